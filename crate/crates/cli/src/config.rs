//! `key = value` configuration with layered overrides.
//!
//! Precedence, lowest first: built-in defaults, the `--config` file, `--set`
//! pairs, dedicated flags such as `--seed`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use phlab_core::attacks::{ExtractionConfig, GeneticConfig};
use phlab_core::datasets::SyntheticSpec;
use phlab_core::{Defense, EmbedderKind, PipelineConfig, PreprocessSpec};

use crate::Failure;

/// Every accepted key with its default and a one-line description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("seed", "42", "master seed for every random quantity"),
    ("threads", "0", "worker threads, 0 for machine parallelism"),
    ("embedder", "tanh", "tanh | linear | a feature file path"),
    ("defense", "none", "none | sha"),
    ("preprocess.width", "32", "embedder input width"),
    ("preprocess.height", "32", "embedder input height"),
    ("preprocess.grayscale", "false", "convert to one channel before embedding"),
    ("ga.population_start", "100", "initial population"),
    ("ga.population_end", "10", "population floor"),
    ("ga.decay_rate", "0.97", "population decay per generation"),
    ("ga.iterations", "50", "generations"),
    ("ga.children_per_iter", "20", "children per generation"),
    ("ga.mutation_range", "0.05", "mutation step bound"),
    ("extraction.epochs", "25", "descent epochs"),
    ("extraction.steps_per_epoch", "100", "descent steps per epoch"),
    ("extraction.learning_rate", "2e-5", "descent step size"),
    ("extraction.entropy_epsilon", "1e-8", "entropy term offset"),
    ("synthetic.classes", "10", "synthetic class count"),
    ("synthetic.per_class", "25", "synthetic images per class for attack commands"),
    ("synthetic.image_size", "32", "synthetic image side length"),
];

#[derive(Debug, Clone)]
pub struct Settings(BTreeMap<String, String>);

impl Default for Settings {
    fn default() -> Self {
        Self(
            KEYS.iter()
                .map(|(k, v, _)| (k.to_string(), v.to_string()))
                .collect(),
        )
    }
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Failure> {
        match self.0.get_mut(key) {
            Some(slot) => {
                *slot = value.trim().to_string();
                Ok(())
            }
            None => Err(Failure::Usage(format!(
                "unknown config key {key:?}; valid keys: {}",
                KEYS.iter().map(|k| k.0).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), Failure> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected key=value, got {pair:?}")))?;
        self.set(k.trim(), v)
    }

    /// Applies a config file: one `key = value` per line, `#` starts a comment.
    pub fn load_file(&mut self, path: &Path) -> Result<(), Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            self.set(k.trim(), v)
                .map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        Ok(())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T, Failure>
    where
        T::Err: fmt::Display,
    {
        let raw = &self.0[key];
        raw.parse()
            .map_err(|e| Failure::Usage(format!("config key {key} = {raw:?}: {e}")))
    }

    pub fn resolve(&self) -> Result<CliConfig, Failure> {
        let seed: u64 = self.get("seed")?;
        let embedder = match self.0["embedder"].as_str() {
            "tanh" => EmbedderKind::TanhSurrogate,
            "linear" => EmbedderKind::LinearSurrogate,
            path => EmbedderKind::FeatureFile(PathBuf::from(path)),
        };
        let defense: Defense = self.get("defense")?;
        let (w, h): (usize, usize) = (self.get("preprocess.width")?, self.get("preprocess.height")?);
        if w == 0 || h == 0 {
            return Err(Failure::Usage("preprocess size must be positive".into()));
        }
        let pipeline = PipelineConfig::from_seed(seed)
            .with_embedder(embedder)
            .with_defense(defense)
            .with_preprocess(PreprocessSpec::new(w, h, self.get("preprocess.grayscale")?));
        let genetic = GeneticConfig {
            population_start: self.get("ga.population_start")?,
            population_end: self.get("ga.population_end")?,
            decay_rate: self.get("ga.decay_rate")?,
            iterations: self.get("ga.iterations")?,
            children_per_iter: self.get("ga.children_per_iter")?,
            mutation_range: self.get("ga.mutation_range")?,
            rng_seed: seed,
        };
        genetic.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        let extraction = ExtractionConfig {
            epochs: self.get("extraction.epochs")?,
            steps_per_epoch: self.get("extraction.steps_per_epoch")?,
            learning_rate: self.get("extraction.learning_rate")?,
            entropy_epsilon: self.get("extraction.entropy_epsilon")?,
            rng_seed: seed,
        };
        extraction.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        let synthetic = SyntheticSpec {
            class_count: self.get("synthetic.classes")?,
            per_class: self.get("synthetic.per_class")?,
            image_size: self.get("synthetic.image_size")?,
            rng_seed: seed,
        };
        if synthetic.class_count == 0 || synthetic.per_class == 0 || synthetic.image_size == 0 {
            return Err(Failure::Usage("synthetic.* values must be positive".into()));
        }
        Ok(CliConfig {
            seed,
            threads: self.get("threads")?,
            pipeline,
            genetic,
            extraction,
            synthetic,
        })
    }

    /// A config file reproducing these settings, one commented line per key.
    pub fn describe(&self) -> String {
        KEYS.iter()
            .map(|(k, _, doc)| format!("{k} = {}  # {doc}\n", self.0[*k]))
            .collect()
    }

    /// The settings as `(key, value)` pairs, in key order.
    pub fn snapshot(&self) -> Vec<(String, String)> {
        self.0.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub seed: u64,
    pub threads: usize,
    pub pipeline: PipelineConfig,
    pub genetic: GeneticConfig,
    pub extraction: ExtractionConfig,
    pub synthetic: SyntheticSpec,
}
