use super::{AttackError, HashOracle};
use crate::imaging::Image;
use crate::pipeline::{hamming_similarity, BinaryHash};

/// Best Hamming similarity to `target` among `n` sampled images.
///
/// Averaged over targets this estimates the expected best similarity an
/// attacker gets from `n` oracle queries on random images, the yardstick any
/// near-collision attack with the same query budget has to beat.
pub fn baseline_max_similarity<O, S>(
    target: &BinaryHash,
    mut sampler: S,
    n: usize,
    oracle: &O,
) -> Result<f64, AttackError>
where
    O: HashOracle + ?Sized,
    S: FnMut() -> Image,
{
    if n == 0 {
        return Err(AttackError::Config("baseline needs at least one sample".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for _ in 0..n {
        let h = oracle.query(&sampler())?;
        best = best.max(hamming_similarity(&h, target));
    }
    Ok(best)
}
