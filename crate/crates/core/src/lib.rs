//! Perceptual hashing security lab.
//!
//! A surrogate perceptual-hash pipeline (embedding, hyperplane LSH, 96-bit
//! hash, optional SHA-256 stage), three black-box interpolation attacks
//! against it, and experiment runners that measure them.

pub mod attacks;
pub mod datasets;
pub mod experiments;
pub mod imaging;
pub mod pipeline;
pub mod rng;

pub use imaging::{Image, ImageError, PreprocessSpec};
pub use pipeline::{
    hamming_similarity, BinaryHash, Defense, EmbedderKind, FeatureVector, HashingMatrix, Pipeline,
    PipelineConfig, PipelineError,
};
