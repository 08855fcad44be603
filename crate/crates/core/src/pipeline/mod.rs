//! The hash pipeline: preprocess → embed → hyperplane LSH → optional SHA stage.
//!
//! A [`Pipeline`] is built once from a [`PipelineConfig`] and is immutable
//! afterwards; hashing takes `&self` and can run from many threads at once.

mod defense;
mod embedder;
mod features;
mod hash;
mod lsh;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub use defense::sha_block;
pub use embedder::{Embedder, GaussianProjection, TANH_GAIN};
pub use features::{FeatureTable, FeatureVector, FEATURE_DIM};
pub use hash::{hamming_similarity, BinaryHash, HASH_BITS, HASH_BYTES};
pub use lsh::{lsh_hash, HashingMatrix};

use thiserror::Error;

use crate::imaging::{ssim, Image, ImageError, PreprocessSpec};
use crate::rng::derive_seed;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("no precomputed features for image {}", .0.as_deref().unwrap_or("<unnamed>"))]
    MissingFeature(Option<String>),
    #[error("feature vector has non-finite entry at index {0}")]
    NonFiniteFeature(usize),
    #[error("feature vector has {0} entries, expected {FEATURE_DIM}")]
    FeatureLength(usize),
    #[error("feature file line {line}: {message}")]
    FeatureFile { line: usize, message: String },
    #[error("embedder expects {expected} inputs, got {actual}")]
    InputLength { expected: usize, actual: usize },
    #[error("invalid hash {0:?}: expected 24 hex digits")]
    HashFormat(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedderKind {
    LinearSurrogate,
    TanhSurrogate,
    FeatureFile(PathBuf),
}

impl fmt::Display for EmbedderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbedderKind::LinearSurrogate => f.write_str("linear"),
            EmbedderKind::TanhSurrogate => f.write_str("tanh"),
            EmbedderKind::FeatureFile(p) => write!(f, "feature-file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Defense {
    #[default]
    None,
    ShaAtTheEnd,
}

impl fmt::Display for Defense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Defense::None => "none",
            Defense::ShaAtTheEnd => "sha",
        })
    }
}

impl FromStr for Defense {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Defense::None),
            "sha" | "sha-at-the-end" | "sha256" => Ok(Defense::ShaAtTheEnd),
            other => Err(PipelineError::Config(format!("unknown defense {other:?}"))),
        }
    }
}

/// Everything that determines a pipeline. Equal configs hash equal inputs equally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub embedder: EmbedderKind,
    pub embedder_seed: u64,
    pub matrix_seed: u64,
    pub preprocess: PreprocessSpec,
    pub defense: Defense,
}

impl PipelineConfig {
    /// Derives both seeds from one master seed.
    pub fn from_seed(seed: u64) -> Self {
        Self {
            embedder: EmbedderKind::TanhSurrogate,
            embedder_seed: derive_seed(seed, 1),
            matrix_seed: derive_seed(seed, 2),
            preprocess: PreprocessSpec::default(),
            defense: Defense::None,
        }
    }

    pub fn with_embedder(mut self, embedder: EmbedderKind) -> Self {
        self.embedder = embedder;
        self
    }

    pub fn with_defense(mut self, defense: Defense) -> Self {
        self.defense = defense;
        self
    }

    pub fn with_preprocess(mut self, preprocess: PreprocessSpec) -> Self {
        self.preprocess = preprocess;
        self
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::from_seed(42)
    }
}

/// Operational stand-in for "semantically similar": `1 - ssim(x, y) <= epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemanticThreshold {
    epsilon: f64,
}

impl SemanticThreshold {
    pub fn new(epsilon: f64) -> Result<Self, PipelineError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(PipelineError::Config(format!(
                "semantic threshold {epsilon} must lie in (0, 1)"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn similar(&self, x: &Image, y: &Image) -> Result<bool, ImageError> {
        Ok(1.0 - ssim(x, y)? <= self.epsilon)
    }
}

impl Default for SemanticThreshold {
    fn default() -> Self {
        Self { epsilon: 0.05 }
    }
}

/// Both outputs of one hashing pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashOutput {
    /// LSH output before any defense stage.
    pub perceptual: BinaryHash,
    /// What the pipeline emits: `perceptual`, or its SHA block when the defense is on.
    pub emitted: BinaryHash,
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    embedder: Embedder,
    matrix: HashingMatrix,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self, PipelineError> {
        let embedder = match &config.embedder {
            EmbedderKind::LinearSurrogate => Embedder::Linear(GaussianProjection::from_seed(
                config.embedder_seed,
                config.preprocess.input_len(),
            )),
            EmbedderKind::TanhSurrogate => Embedder::Tanh(GaussianProjection::from_seed(
                config.embedder_seed,
                config.preprocess.input_len(),
            )),
            EmbedderKind::FeatureFile(path) => Embedder::FeatureFile(FeatureTable::load(path)?),
        };
        Ok(Self::with_embedder(config, embedder))
    }

    /// Uses a caller-supplied embedder; `config.embedder` is kept only as a label.
    pub fn with_embedder(config: PipelineConfig, embedder: Embedder) -> Self {
        let matrix = HashingMatrix::from_seed(config.matrix_seed);
        Self {
            config,
            embedder,
            matrix,
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn matrix(&self) -> &HashingMatrix {
        &self.matrix
    }

    pub fn preprocess(&self, img: &Image) -> Image {
        self.config.preprocess.apply(img)
    }

    pub fn embed(&self, img: &Image) -> Result<FeatureVector, PipelineError> {
        self.embedder.embed(&self.preprocess(img))
    }

    /// Pre-threshold hyperplane projections of the image's features.
    pub fn projections(&self, img: &Image) -> Result<[f64; HASH_BITS], PipelineError> {
        Ok(self.matrix.project(&self.embed(img)?))
    }

    pub fn hash_output(&self, img: &Image) -> Result<HashOutput, PipelineError> {
        let perceptual = lsh_hash(&self.embed(img)?, &self.matrix);
        let emitted = match self.config.defense {
            Defense::None => perceptual,
            Defense::ShaAtTheEnd => sha_block(&perceptual),
        };
        Ok(HashOutput {
            perceptual,
            emitted,
        })
    }

    /// The hash the pipeline emits, including the defense stage when configured.
    pub fn hash_image(&self, img: &Image) -> Result<BinaryHash, PipelineError> {
        Ok(self.hash_output(img)?.emitted)
    }
}
