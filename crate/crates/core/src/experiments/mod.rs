//! Experiment runners with summary statistics and CSV/SVG output.
//!
//! Runners are deterministic given their inputs and seed. Work is spread over
//! samples with rayon, each sample drawing from its own counter-split
//! generator, and results are reduced in sample order afterwards.

mod evaluations;
mod report;
mod stats;
mod sweep;

pub use evaluations::{run_collision_eval, run_evasion_eval, run_extraction_eval};
pub use report::{emit_report, Aggregate, Bar, Chart, ExperimentReport, Series};
pub use stats::{Summary, Z95, Z99};
pub use sweep::{
    alpha_steps, run_averaged_sweep, run_interpolation_sweep, run_uniformity, InterpolationSweep,
    MID_ALPHA,
};

use thiserror::Error;

use crate::attacks::AttackError;
use crate::imaging::ImageError;
use crate::pipeline::PipelineError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
