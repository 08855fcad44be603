//! Class inference from a hash alone.
//!
//! Fits signed weights `p` (with `Σ|p_i| = 1`) so that `Σ p_i h_i` approximates
//! the target in the `{-1, 1}` hash view, then predicts the class holding the
//! most absolute weight. The objective is
//!
//! ```text
//! L(p) = ‖Σ p_i h_i - h*‖² - Σ |p_i| log(|p_i| + ε)
//! ```
//!
//! where the second term is an entropy penalty favouring few active entries.

use rand::Rng;

use super::{AttackError, InterpolationWeights};
use crate::pipeline::{BinaryHash, HASH_BITS};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionConfig {
    pub epochs: usize,
    pub steps_per_epoch: usize,
    pub learning_rate: f64,
    pub entropy_epsilon: f64,
    /// Breaks ties between classes with equal support.
    pub rng_seed: u64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            epochs: 25,
            steps_per_epoch: 100,
            learning_rate: 2e-5,
            entropy_epsilon: 1e-8,
            rng_seed: 42,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<(), AttackError> {
        if self.epochs == 0 || self.steps_per_epoch == 0 {
            return Err(AttackError::Config("extraction needs at least one step".into()));
        }
        if !(self.learning_rate > 0.0 && self.entropy_epsilon > 0.0) {
            return Err(AttackError::Config(
                "learning rate and entropy epsilon must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// The extraction loss over a fixed database of signed hashes.
#[derive(Debug, Clone)]
pub struct ExtractionObjective {
    hashes: Vec<[f64; HASH_BITS]>,
    target: [f64; HASH_BITS],
    epsilon: f64,
}

impl ExtractionObjective {
    pub fn new(target: &BinaryHash, database: &[BinaryHash], epsilon: f64) -> Self {
        Self {
            hashes: database.iter().map(BinaryHash::signed).collect(),
            target: target.signed(),
            epsilon,
        }
    }

    pub fn dim(&self) -> usize {
        self.hashes.len()
    }

    /// `Σ p_i h_i - h*`.
    pub fn residual(&self, p: &[f64]) -> [f64; HASH_BITS] {
        let mut r = self.target.map(|t| -t);
        for (h, &w) in self.hashes.iter().zip(p) {
            if w != 0.0 {
                for (ri, hi) in r.iter_mut().zip(h) {
                    *ri += w * hi;
                }
            }
        }
        r
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        let fit: f64 = self.residual(p).iter().map(|r| r * r).sum();
        let entropy: f64 = p
            .iter()
            .map(|&w| w.abs() * (w.abs() + self.epsilon).ln())
            .sum();
        fit - entropy
    }

    /// `∂L/∂p_j = 2 h_j·r - sign(p_j) (log(|p_j| + ε) + |p_j| / (|p_j| + ε))`,
    /// taking `sign(0) = 0`.
    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let r = self.residual(p);
        self.hashes
            .iter()
            .zip(p)
            .map(|(h, &w)| {
                let fit = 2.0 * h.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>();
                let a = w.abs();
                let entropy = if w == 0.0 {
                    0.0
                } else {
                    w.signum() * ((a + self.epsilon).ln() + a / (a + self.epsilon))
                };
                fit - entropy
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExtractionOutcome {
    pub predicted_class: usize,
    /// `Σ |p_i|` over the database entries of each class.
    pub support: Vec<f64>,
    pub weights: InterpolationWeights,
    pub final_loss: f64,
}

/// Gradient descent from uniform weights, renormalizing `Σ|p_i| = 1` after each step.
pub fn fit_weights(objective: &ExtractionObjective, cfg: &ExtractionConfig) -> InterpolationWeights {
    let mut p = InterpolationWeights::uniform(objective.dim());
    for _ in 0..cfg.epochs * cfg.steps_per_epoch {
        let grad = objective.gradient(p.as_slice());
        let stepped = p
            .as_slice()
            .iter()
            .zip(&grad)
            .map(|(w, g)| w - cfg.learning_rate * g)
            .collect();
        match InterpolationWeights::normalized(stepped) {
            Some(next) => p = next,
            None => break,
        }
    }
    p
}

/// Predicts the class of the image behind `target` from labeled database hashes.
pub fn extract_class(
    target: &BinaryHash,
    database_hashes: &[BinaryHash],
    labels: &[usize],
    cfg: &ExtractionConfig,
) -> Result<ExtractionOutcome, AttackError> {
    cfg.validate()?;
    if database_hashes.is_empty() || database_hashes.len() != labels.len() {
        return Err(AttackError::Config(format!(
            "{} database hashes with {} labels",
            database_hashes.len(),
            labels.len()
        )));
    }
    let objective = ExtractionObjective::new(target, database_hashes, cfg.entropy_epsilon);
    let weights = fit_weights(&objective, cfg);
    let class_count = labels.iter().max().map_or(0, |m| m + 1);
    let mut support = vec![0.0; class_count];
    for (&label, w) in labels.iter().zip(weights.as_slice()) {
        support[label] += w.abs();
    }
    let best = support.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..class_count).filter(|&c| support[c] == best).collect();
    let predicted_class = if tied.len() == 1 {
        tied[0]
    } else {
        let mut rng = stream_rng(cfg.rng_seed, 0x4558);
        tied[rng.random_range(0..tied.len())]
    };
    Ok(ExtractionOutcome {
        predicted_class,
        final_loss: objective.value(weights.as_slice()),
        support,
        weights,
    })
}
