use super::{Image, ImageError};

/// Tolerance on `Σ|p_i| = 1` accepted by [`combine`].
pub(crate) const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// `alpha * x1 + (1 - alpha) * x2`, per sample.
pub fn interpolate(x1: &Image, x2: &Image, alpha: f64) -> Result<Image, ImageError> {
    x1.check_same_shape(x2)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ImageError::Weights(format!("alpha {alpha} outside [0, 1]")));
    }
    let data = x1
        .data()
        .iter()
        .zip(x2.data())
        .map(|(&a, &b)| (alpha * a + (1.0 - alpha) * b).clamp(0.0, 1.0))
        .collect();
    let (w, h, c) = x1.shape();
    Ok(Image::from_parts_unchecked(w, h, c, data))
}

/// Signed weighted sum `Σ p_i x_i` without clamping.
///
/// Weights must satisfy `Σ|p_i| = 1`; zero weights are skipped.
pub fn combine_unclamped(images: &[Image], weights: &[f64]) -> Result<Vec<f64>, ImageError> {
    let first = images
        .first()
        .ok_or_else(|| ImageError::Weights("empty image database".into()))?;
    if images.len() != weights.len() {
        return Err(ImageError::Weights(format!(
            "{} weights for {} images",
            weights.len(),
            images.len()
        )));
    }
    let l1: f64 = weights.iter().map(|w| w.abs()).sum();
    if (l1 - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(ImageError::Weights(format!("sum of |p_i| is {l1}, expected 1")));
    }
    for img in &images[1..] {
        first.check_same_shape(img)?;
    }
    let mut acc = vec![0.0; first.data().len()];
    for (img, &w) in images.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (a, &v) in acc.iter_mut().zip(img.data()) {
            *a += w * v;
        }
    }
    Ok(acc)
}

/// `I_p = Σ p_i x_i`, clamped to `[0, 1]`.
pub fn combine(images: &[Image], weights: &[f64]) -> Result<Image, ImageError> {
    let mut data = combine_unclamped(images, weights)?;
    for v in &mut data {
        *v = v.clamp(0.0, 1.0);
    }
    let (w, h, c) = images[0].shape();
    Ok(Image::from_parts_unchecked(w, h, c, data))
}
