//! Labeled image sets: seeded synthetic classes and directory ingestion.

mod directory;
mod synthetic;

pub use directory::{load_directory, write_manifest};
pub use synthetic::{generate_synthetic, noise_image, NoiseSampler, SyntheticSpec};

use std::ops::Range;

use thiserror::Error;

use crate::imaging::{Image, ImageError, PreprocessSpec};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset at {0} contains no images")]
    Empty(String),
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: ImageError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(#[from] csv::Error),
    #[error("invalid dataset: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Split {
    #[default]
    Train,
    Validation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub images: Vec<Image>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub split: Split,
    /// Where each image came from: a root-relative path, or the generated id.
    pub sources: Vec<String>,
}

impl LabeledDataset {
    pub fn new(
        images: Vec<Image>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        split: Split,
        sources: Vec<String>,
    ) -> Result<Self, DatasetError> {
        if images.len() != labels.len() || images.len() != sources.len() {
            return Err(DatasetError::Invalid(format!(
                "{} images, {} labels, {} sources",
                images.len(),
                labels.len(),
                sources.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(DatasetError::Invalid(format!(
                "label {bad} with only {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            images,
            labels,
            class_names,
            split,
            sources,
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    /// Images in the order given by `indices`.
    pub fn subset(&self, indices: &[usize], split: Split) -> Self {
        Self {
            images: indices.iter().map(|&i| self.images[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            split,
            sources: indices.iter().map(|&i| self.sources[i].clone()).collect(),
        }
    }

    /// Splits by parity of each image's position within its class: even
    /// positions go to train, odd ones to validation.
    pub fn split(&self) -> (Self, Self) {
        let mut seen = vec![0usize; self.class_count()];
        let (mut train, mut val) = (Vec::new(), Vec::new());
        for (i, &label) in self.labels.iter().enumerate() {
            if seen[label] % 2 == 0 {
                train.push(i);
            } else {
                val.push(i);
            }
            seen[label] += 1;
        }
        (
            self.subset(&train, Split::Train),
            self.subset(&val, Split::Validation),
        )
    }

    /// The first `n` images of every class, preserving order.
    pub fn take_per_class(&self, n: usize) -> Self {
        self.slice_per_class(0..n)
    }

    /// The images whose position within their class lies in `range`, preserving order.
    pub fn slice_per_class(&self, range: Range<usize>) -> Self {
        let mut seen = vec![0usize; self.class_count()];
        let picked: Vec<usize> = (0..self.len())
            .filter(|&i| {
                let l = self.labels[i];
                seen[l] += 1;
                range.contains(&(seen[l] - 1))
            })
            .collect();
        self.subset(&picked, self.split)
    }

    /// Resamples every image to the spec's geometry so the set is homogeneous.
    pub fn preprocessed(&self, spec: &PreprocessSpec) -> Self {
        Self {
            images: self.images.iter().map(|img| spec.apply(img)).collect(),
            ..self.clone()
        }
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}
