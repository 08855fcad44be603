use rand_distr::{Distribution, StandardNormal};

use super::features::{FeatureTable, FeatureVector, FEATURE_DIM};
use super::PipelineError;
use crate::imaging::Image;
use crate::rng::{stream_rng, EMBEDDER_STREAM};

/// Gain applied inside the tanh surrogate.
pub const TANH_GAIN: f64 = 0.5;

/// Stand-ins for the proprietary feature network.
#[derive(Debug, Clone)]
pub enum Embedder {
    /// Seeded Gaussian projection of the `[-1, 1]`-normalized pixels. Exactly
    /// affine in pixel values.
    Linear(GaussianProjection),
    /// `tanh(TANH_GAIN * projection)`: nearly linear around the origin.
    Tanh(GaussianProjection),
    /// Lookup of precomputed features by [`Image::id`].
    FeatureFile(FeatureTable),
}

impl Embedder {
    /// Embeds an image that has already been preprocessed.
    pub fn embed(&self, img: &Image) -> Result<FeatureVector, PipelineError> {
        match self {
            Embedder::Linear(p) => p.project(img),
            Embedder::Tanh(p) => {
                let f = p.project(img)?;
                FeatureVector::new(f.values().map(|v| (TANH_GAIN * v).tanh()))
            }
            Embedder::FeatureFile(table) => {
                let id = img.id().ok_or(PipelineError::MissingFeature(None))?;
                table
                    .get(id)
                    .cloned()
                    .ok_or_else(|| PipelineError::MissingFeature(Some(id.to_string())))
            }
        }
    }
}

/// A `128 x input_len` matrix with i.i.d. `N(0, 1/input_len)` entries, so each
/// output has roughly the RMS of the normalized input.
#[derive(Debug, Clone)]
pub struct GaussianProjection {
    input_len: usize,
    weights: Vec<f64>,
}

impl GaussianProjection {
    pub fn from_seed(seed: u64, input_len: usize) -> Self {
        assert!(input_len > 0);
        let mut rng = stream_rng(seed, EMBEDDER_STREAM);
        let scale = (input_len as f64).sqrt().recip();
        let weights = (0..FEATURE_DIM * input_len)
            .map(|_| scale * Distribution::<f64>::sample(&StandardNormal, &mut rng))
            .collect::<Vec<f64>>();
        Self { input_len, weights }
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.input_len..(i + 1) * self.input_len]
    }

    pub fn project(&self, img: &Image) -> Result<FeatureVector, PipelineError> {
        let data = img.data();
        if data.len() != self.input_len {
            return Err(PipelineError::InputLength {
                expected: self.input_len,
                actual: data.len(),
            });
        }
        let normalized: Vec<f64> = data.iter().map(|&v| 2.0 * v - 1.0).collect();
        let mut out = [0.0; FEATURE_DIM];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(&normalized).map(|(w, x)| w * x).sum();
        }
        FeatureVector::new(out)
    }
}
