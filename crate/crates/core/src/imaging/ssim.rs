use super::{Image, ImageError};

/// Stabilizing constants `(K1 L)^2` and `(K2 L)^2` with `K1 = 0.01`,
/// `K2 = 0.03` and dynamic range `L = 1`.
pub const SSIM_C1: f64 = 0.01 * 0.01;
pub const SSIM_C2: f64 = 0.03 * 0.03;

pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    0.299 * r + 0.587 * g + 0.114 * b
}

fn gray_samples(img: &Image) -> Vec<f64> {
    match img.channels() {
        1 => img.data().to_vec(),
        _ => img
            .data()
            .chunks_exact(3)
            .map(|px| luma(px[0], px[1], px[2]))
            .collect(),
    }
}

/// Structural similarity over the whole image (one window), computed on luma.
///
/// Population (1/N) moments.
pub fn ssim(x: &Image, y: &Image) -> Result<f64, ImageError> {
    x.check_same_shape(y)?;
    let gx = gray_samples(x);
    let gy = gray_samples(y);
    let n = gx.len() as f64;
    let mu_x = gx.iter().sum::<f64>() / n;
    let mu_y = gy.iter().sum::<f64>() / n;
    let (mut var_x, mut var_y, mut cov) = (0.0, 0.0, 0.0);
    for (&a, &b) in gx.iter().zip(&gy) {
        let (dx, dy) = (a - mu_x, b - mu_y);
        var_x += dx * dx;
        var_y += dy * dy;
        cov += dx * dy;
    }
    var_x /= n;
    var_y /= n;
    cov /= n;
    let num = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov + SSIM_C2);
    let den = (mu_x * mu_x + mu_y * mu_y + SSIM_C1) * (var_x + var_y + SSIM_C2);
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(32, 32, 3, |_, _, _| rng.random::<f64>()).unwrap()
    }

    #[test]
    fn identical_images_score_one() {
        let x = noise(1);
        assert!((ssim(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        let flat = Image::filled(4, 4, 1, 0.0);
        assert!((ssim(&flat, &flat).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric() {
        let (x, y) = (noise(2), noise(3));
        assert_eq!(ssim(&x, &y).unwrap(), ssim(&y, &x).unwrap());
    }

    #[test]
    fn independent_noise_is_dissimilar() {
        let s = ssim(&noise(4), &noise(5)).unwrap();
        assert!(s.abs() < 0.2, "ssim {s}");
    }

    #[test]
    fn shape_mismatch() {
        assert!(ssim(&Image::filled(2, 2, 1, 0.0), &Image::filled(2, 1, 1, 0.0)).is_err());
    }

    #[test]
    fn matches_hand_computed_value() {
        // Gray samples [0, 1] and [1, 0]: mu = 0.5 each, var = 0.25 each, cov = -0.25.
        let x = Image::new(2, 1, 1, vec![0.0, 1.0]).unwrap();
        let y = Image::new(2, 1, 1, vec![1.0, 0.0]).unwrap();
        let expected = (0.5 + SSIM_C1) * (-0.5 + SSIM_C2) / ((0.5 + SSIM_C1) * (0.5 + SSIM_C2));
        assert!((ssim(&x, &y).unwrap() - expected).abs() < 1e-15);
    }
}
