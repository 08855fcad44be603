//! Shared fixtures for the benchmarks.

use phlab_core::datasets::{generate_synthetic, LabeledDataset, SyntheticSpec};

/// Ten classes of 32x32 synthetic images, `per_class` each.
pub fn fixture(per_class: usize) -> LabeledDataset {
    generate_synthetic(&SyntheticSpec {
        per_class,
        ..Default::default()
    })
}
