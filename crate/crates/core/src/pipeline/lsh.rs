use rand_distr::{Distribution, StandardNormal};

use super::features::{FeatureVector, FEATURE_DIM};
use super::hash::{BinaryHash, HASH_BITS};
use crate::rng::{stream_rng, MATRIX_STREAM};

/// 96 random hyperplane normals in feature space, standard normal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct HashingMatrix {
    rows: Vec<[f64; FEATURE_DIM]>,
    seed: u64,
}

impl HashingMatrix {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = stream_rng(seed, MATRIX_STREAM);
        let rows = (0..HASH_BITS)
            .map(|_| {
                let mut row = [0.0; FEATURE_DIM];
                for v in &mut row {
                    *v = StandardNormal.sample(&mut rng);
                }
                row
            })
            .collect::<Vec<_>>();
        debug_assert!(rows.iter().all(|r| r.iter().any(|&v| v != 0.0)));
        Self { rows, seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rows(&self) -> &[[f64; FEATURE_DIM]] {
        &self.rows
    }

    /// Pre-threshold values `row_j · f`.
    pub fn project(&self, f: &FeatureVector) -> [f64; HASH_BITS] {
        let mut out = [0.0; HASH_BITS];
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = f.dot(row);
        }
        out
    }
}

/// Bit `j` is 1 iff `row_j · f >= 0`.
pub fn lsh_hash(f: &FeatureVector, m: &HashingMatrix) -> BinaryHash {
    let bits: Vec<bool> = m.project(f).iter().map(|&v| v >= 0.0).collect();
    BinaryHash::from_bits(&bits)
}
