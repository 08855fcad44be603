//! Image representation, PPM/PNG codecs, preprocessing, pixel-space blending,
//! and a global SSIM.
//!
//! Samples are `f64` in `[0, 1]`, stored row-major with interleaved channels.

mod blend;
mod codec;
mod resize;
mod ssim;

pub use blend::{combine, combine_unclamped, interpolate};
pub(crate) use blend::WEIGHT_SUM_TOLERANCE;
pub use codec::{decode_image, encode_ppm, read_image, write_ppm};
pub use resize::{resize_bilinear, to_grayscale, PreprocessSpec};
pub use ssim::{luma, ssim, SSIM_C1, SSIM_C2};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize, usize),
        right: (usize, usize, usize),
    },
    #[error("expected {expected} samples for the declared shape, got {actual}")]
    DataLength { expected: usize, actual: usize },
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    Channels(usize),
    #[error("image dimensions must be positive")]
    EmptyImage,
    #[error("sample {value} at index {index} is outside [0, 1]")]
    SampleRange { index: usize, value: f64 },
    #[error("weights do not match the database: {0}")]
    Weights(String),
    #[error("decode error: {0}")]
    Decode(String),
    #[error("unsupported format: {0}")]
    Unsupported(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A normalized raster image.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
    id: Option<String>,
}

impl Image {
    /// Builds an image, checking shape and sample range.
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage);
        }
        if channels != 1 && channels != 3 {
            return Err(ImageError::Channels(channels));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(ImageError::DataLength {
                expected,
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(ImageError::SampleRange { index, value });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
            id: None,
        })
    }

    /// A constant image. Panics if `value` is outside `[0, 1]` or the shape is invalid.
    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Self {
        Self::new(width, height, channels, vec![value; width * height * channels])
            .expect("valid constant image")
    }

    /// Builds an image from a per-sample function `f(x, y, channel)`; results are clamped to `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self, ImageError> {
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(x, y, c).clamp(0.0, 1.0));
                }
            }
        }
        Self::new(width, height, channels, data)
    }

    /// Internal constructor for data already known to be valid.
    pub(crate) fn from_parts_unchecked(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        Self {
            width,
            height,
            channels,
            data,
            id: None,
        }
    }

    /// Attaches an identifier, used by the feature-file embedder to look up
    /// precomputed features.
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn sample(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    pub(crate) fn check_same_shape(&self, other: &Image) -> Result<(), ImageError> {
        if self.shape() != other.shape() {
            return Err(ImageError::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_ranges() {
        assert!(matches!(
            Image::new(2, 2, 3, vec![0.0; 11]),
            Err(ImageError::DataLength { expected: 12, actual: 11 })
        ));
        assert!(matches!(
            Image::new(1, 1, 2, vec![0.0; 2]),
            Err(ImageError::Channels(2))
        ));
        assert!(matches!(
            Image::new(1, 1, 1, vec![1.5]),
            Err(ImageError::SampleRange { index: 0, .. })
        ));
        assert!(matches!(
            Image::new(0, 1, 1, vec![]),
            Err(ImageError::EmptyImage)
        ));
    }

    #[test]
    fn from_fn_is_row_major_interleaved() {
        let img = Image::from_fn(2, 2, 3, |x, y, c| (x + 2 * y) as f64 * 0.1 + c as f64 * 0.01)
            .unwrap();
        assert_eq!(img.data()[0..3], [0.0, 0.01, 0.02]);
        assert!((img.sample(1, 1, 2) - 0.32).abs() < 1e-12);
        assert!((img.data()[(1 * 2 + 1) * 3 + 2] - 0.32).abs() < 1e-12);
    }
}
