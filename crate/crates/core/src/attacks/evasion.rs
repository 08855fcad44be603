use super::{AttackError, HashOracle};
use crate::imaging::{interpolate, ssim, Image};

pub const DEFAULT_GRID_STEP: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct EvasionResult {
    /// Largest grid α whose interpolation hashes differently from the source; 0 on failure.
    pub alpha_star: f64,
    pub adversarial_image: Image,
    pub ssim_to_source: f64,
    pub evaded: bool,
    pub queries: usize,
}

/// Interpolation evasion: blends a small fraction of `carrier` into `source`.
///
/// Scans `α = 1 - step, 1 - 2·step, ...` (strictly inside `(0, 1)`) and stops at
/// the first α whose hash of `α·source + (1-α)·carrier` differs from the
/// source's hash. A scan rather than bisection, because hash inequality need not
/// be monotone in α for a nonlinear embedder.
pub fn evade<O: HashOracle + ?Sized>(
    source: &Image,
    carrier: &Image,
    oracle: &O,
    grid_step: f64,
) -> Result<EvasionResult, AttackError> {
    source.check_same_shape(carrier)?;
    if !(grid_step > 0.0 && grid_step < 1.0) {
        return Err(AttackError::Config(format!(
            "grid step {grid_step} must lie in (0, 1)"
        )));
    }
    let reference = oracle.query(source)?;
    let mut queries = 1;
    for alpha in alpha_grid(grid_step) {
        let candidate = interpolate(source, carrier, alpha)?;
        queries += 1;
        if oracle.query(&candidate)? != reference {
            return Ok(EvasionResult {
                alpha_star: alpha,
                ssim_to_source: ssim(source, &candidate)?,
                adversarial_image: candidate,
                evaded: true,
                queries,
            });
        }
    }
    let fallback = interpolate(source, carrier, 0.0)?;
    Ok(EvasionResult {
        alpha_star: 0.0,
        ssim_to_source: ssim(source, &fallback)?,
        adversarial_image: fallback,
        evaded: false,
        queries,
    })
}

/// `1 - k·step` for `k = 1, 2, ...` while the value stays above zero.
pub fn alpha_grid(step: f64) -> impl Iterator<Item = f64> {
    (1..)
        .map(move |k| 1.0 - k as f64 * step)
        .take_while(|&a| a > 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{EmbedderKind, Pipeline, PipelineConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(32, 32, 3, |_, _, _| rng.random::<f64>()).unwrap()
    }

    #[test]
    fn grid_excludes_endpoints() {
        let g: Vec<f64> = alpha_grid(0.25).collect();
        assert_eq!(g, vec![0.75, 0.5, 0.25]);
        assert_eq!(alpha_grid(0.01).count(), 99);
    }

    #[test]
    fn identical_carrier_cannot_evade() {
        let p = Pipeline::new(PipelineConfig::from_seed(3)).unwrap();
        let x = noise(1);
        let r = evade(&x, &x, &p, 0.05).unwrap();
        assert!(!r.evaded);
        assert_eq!(r.alpha_star, 0.0);
        assert_eq!(r.queries, 20);
    }

    #[test]
    fn matches_exhaustive_scan() {
        let p = Pipeline::new(
            PipelineConfig::from_seed(4).with_embedder(EmbedderKind::LinearSurrogate),
        )
        .unwrap();
        let (x, x0) = (noise(10), noise(11));
        let r = evade(&x, &x0, &p, 0.01).unwrap();
        assert!(r.evaded);
        // Oracle: hash every grid point, take the largest differing alpha.
        let h = p.hash_image(&x).unwrap();
        let exhaustive = (1..100)
            .map(|k| 1.0 - k as f64 * 0.01)
            .filter(|&a| p.hash_image(&interpolate(&x, &x0, a).unwrap()).unwrap() != h)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.alpha_star, exhaustive);
        assert_ne!(p.hash_image(&r.adversarial_image).unwrap(), h);
        let bound = ssim(&x, &interpolate(&x, &x0, 0.99).unwrap()).unwrap();
        assert!(r.ssim_to_source <= 1.0 && r.ssim_to_source > 0.0);
        assert!(r.ssim_to_source <= bound + 1e-12);
    }

    #[test]
    fn rejects_bad_step_and_shapes() {
        let x = noise(1);
        let oracle = |_: &Image| crate::pipeline::BinaryHash::from_bytes([0; 12]);
        assert!(evade(&x, &x, &oracle, 0.0).is_err());
        assert!(evade(&x, &x, &oracle, 1.0).is_err());
        assert!(evade(&x, &Image::filled(2, 2, 3, 0.0), &oracle, 0.1).is_err());
    }
}
