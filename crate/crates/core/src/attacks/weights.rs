use std::fmt;

use super::AttackError;
use crate::imaging::WEIGHT_SUM_TOLERANCE;

/// Signed interpolation weights over a database with `Σ|p_i| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationWeights(Vec<f64>);

impl InterpolationWeights {
    /// Validates already-normalized weights.
    pub fn new(p: Vec<f64>) -> Result<Self, AttackError> {
        let l1: f64 = p.iter().map(|v| v.abs()).sum();
        if p.is_empty() || !l1.is_finite() || (l1 - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(AttackError::Weights(format!(
                "sum of |p_i| is {l1}, expected 1"
            )));
        }
        Ok(Self(p))
    }

    /// Scales `raw` so that `Σ|p_i| = 1`. Returns `None` if every entry is zero
    /// or any is non-finite.
    pub fn normalized(mut raw: Vec<f64>) -> Option<Self> {
        let l1: f64 = raw.iter().map(|v| v.abs()).sum();
        if !(l1.is_finite() && l1 > 0.0) {
            return None;
        }
        for v in &mut raw {
            *v /= l1;
        }
        Some(Self(raw))
    }

    pub fn one_hot(k: usize, j: usize) -> Self {
        let mut p = vec![0.0; k];
        p[j] = 1.0;
        Self(p)
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nonzero(&self) -> usize {
        self.0.iter().filter(|&&v| v != 0.0).count()
    }

    /// Parses the sparse `index:value` form produced by `Display`, for a database of size `k`.
    pub fn parse_sparse(text: &str, k: usize) -> Result<Self, AttackError> {
        let mut p = vec![0.0; k];
        for tok in text.split_whitespace() {
            let bad = || AttackError::Weights(format!("bad sparse entry {tok:?}"));
            let (i, v) = tok.split_once(':').ok_or_else(bad)?;
            let i: usize = i.parse().map_err(|_| bad())?;
            let v: f64 = v.parse().map_err(|_| bad())?;
            *p.get_mut(i).ok_or_else(bad)? = v;
        }
        Self::new(p)
    }
}

/// Sparse `index:value` pairs separated by spaces; zero entries are omitted.
impl fmt::Display for InterpolationWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, v) in self.0.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{i}:{v}")?;
            first = false;
        }
        Ok(())
    }
}
