use super::{luma, Image};

/// Target geometry applied before embedding. The embedder additionally maps
/// samples affinely from `[0, 1]` to `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessSpec {
    pub target_width: usize,
    pub target_height: usize,
    pub grayscale: bool,
}

impl PreprocessSpec {
    pub fn new(target_width: usize, target_height: usize, grayscale: bool) -> Self {
        assert!(
            target_width > 0 && target_height > 0,
            "preprocess dimensions must be positive"
        );
        Self {
            target_width,
            target_height,
            grayscale,
        }
    }

    pub fn channels(&self) -> usize {
        if self.grayscale {
            1
        } else {
            3
        }
    }

    /// Length of the flattened embedder input.
    pub fn input_len(&self) -> usize {
        self.target_width * self.target_height * self.channels()
    }

    /// Converts channel layout and resizes.
    pub fn apply(&self, img: &Image) -> Image {
        let converted;
        let src = match (self.grayscale, img.channels()) {
            (true, 3) => {
                converted = to_grayscale(img);
                &converted
            }
            (false, 1) => {
                converted = gray_to_rgb(img);
                &converted
            }
            _ => img,
        };
        resize_bilinear(src, self)
    }
}

impl Default for PreprocessSpec {
    fn default() -> Self {
        Self::new(32, 32, false)
    }
}

/// Luma conversion with weights 0.299 / 0.587 / 0.114. One-channel input is returned as-is.
pub fn to_grayscale(img: &Image) -> Image {
    if img.channels() == 1 {
        return img.clone();
    }
    let data = img
        .data()
        .chunks_exact(3)
        .map(|px| luma(px[0], px[1], px[2]).clamp(0.0, 1.0))
        .collect();
    Image::from_parts_unchecked(img.width(), img.height(), 1, data)
}

fn gray_to_rgb(img: &Image) -> Image {
    let data = img.data().iter().flat_map(|&v| [v, v, v]).collect();
    Image::from_parts_unchecked(img.width(), img.height(), 3, data)
}

/// Pixel-center-aligned bilinear resampling to the spec's dimensions; channel
/// count is preserved. Equal dimensions return the input unchanged.
pub fn resize_bilinear(img: &Image, spec: &PreprocessSpec) -> Image {
    let (sw, sh, ch) = img.shape();
    let (dw, dh) = (spec.target_width, spec.target_height);
    if (sw, sh) == (dw, dh) {
        return img.clone();
    }
    let xs = axis_taps(sw, dw);
    let ys = axis_taps(sh, dh);
    let src = img.data();
    let mut data = Vec::with_capacity(dw * dh * ch);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            for c in 0..ch {
                let at = |x: usize, y: usize| src[(y * sw + x) * ch + c];
                let top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
                let bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
                data.push((top * (1.0 - fy) + bottom * fy).clamp(0.0, 1.0));
            }
        }
    }
    let out = Image::from_parts_unchecked(dw, dh, ch, data);
    match img.id() {
        Some(id) => out.with_id(id),
        None => out,
    }
}

/// For each destination index: the two source taps and the weight of the second.
fn axis_taps(src_len: usize, dst_len: usize) -> Vec<(usize, usize, f64)> {
    let scale = src_len as f64 / dst_len as f64;
    let max = (src_len - 1) as f64;
    (0..dst_len)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, max);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src_len - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}
