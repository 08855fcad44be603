//! Black-box attacks against a perceptual hash.
//!
//! Every attack reaches the hash only through [`HashOracle`]; none of them can
//! see the pipeline's configuration, embedder, or hashing matrix.

mod baseline;
mod evasion;
pub mod extraction;
pub mod genetic;
mod oracle;
mod weights;

pub use baseline::baseline_max_similarity;
pub use evasion::{alpha_grid, evade, EvasionResult, DEFAULT_GRID_STEP};
pub use extraction::{extract_class, ExtractionConfig, ExtractionObjective, ExtractionOutcome};
pub use genetic::{genetic_near_collision, GeneticConfig, GeneticOutcome};
pub use oracle::{CountingOracle, HashOracle};
pub use weights::InterpolationWeights;

use thiserror::Error;

use crate::imaging::ImageError;
use crate::pipeline::PipelineError;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("invalid interpolation weights: {0}")]
    Weights(String),
    #[error("invalid attack configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}
