use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{LabeledDataset, Split};
use crate::imaging::Image;
use crate::rng::{derive_seed, sample_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub class_count: usize,
    pub per_class: usize,
    pub image_size: usize,
    pub rng_seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            class_count: 10,
            per_class: 25,
            image_size: 32,
            rng_seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Motif {
    Disk,
    Square,
    Triangle,
    Ring,
    Cross,
    HorizontalBars,
    Diamond,
    VerticalBars,
    Checker,
    TwoDots,
}

const MOTIFS: [Motif; 10] = [
    Motif::Disk,
    Motif::Square,
    Motif::Triangle,
    Motif::Ring,
    Motif::Cross,
    Motif::HorizontalBars,
    Motif::Diamond,
    Motif::VerticalBars,
    Motif::Checker,
    Motif::TwoDots,
];

impl Motif {
    /// Membership test in motif coordinates, where the motif spans `[-1, 1]^2`.
    fn contains(self, u: f64, v: f64) -> bool {
        let inside_box = u.abs() <= 1.0 && v.abs() <= 1.0;
        match self {
            Motif::Disk => u * u + v * v <= 1.0,
            Motif::Square => u.abs().max(v.abs()) <= 0.85,
            Motif::Triangle => (-0.8..=0.8).contains(&v) && u.abs() <= (v + 0.8) * 0.6,
            Motif::Ring => (0.3..=1.0).contains(&(u * u + v * v)),
            Motif::Cross => (u.abs() <= 0.3 && v.abs() <= 1.0) || (v.abs() <= 0.3 && u.abs() <= 1.0),
            Motif::HorizontalBars => inside_box && ((v + 1.0) * 2.5).floor() as i64 % 2 == 0,
            Motif::Diamond => u.abs() + v.abs() <= 1.0,
            Motif::VerticalBars => inside_box && ((u + 1.0) * 2.5).floor() as i64 % 2 == 0,
            Motif::Checker => {
                inside_box && (((u + 1.0) * 2.0).floor() + ((v + 1.0) * 2.0).floor()) as i64 % 2 == 0
            }
            Motif::TwoDots => (u - 0.5).powi(2) + v * v <= 0.2 || (u + 0.5).powi(2) + v * v <= 0.2,
        }
    }
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [f64; 3] {
    let h6 = h.rem_euclid(1.0) * 6.0;
    let c = v * s;
    let x = c * (1.0 - ((h6 % 2.0) - 1.0).abs());
    let (r, g, b) = match h6 as usize {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r + m, g + m, b + m]
}

/// Fixed per-class template; samples jitter around it.
struct ClassTemplate {
    orientation: f64,
    motif: Motif,
    foreground: [f64; 3],
    background: [f64; 3],
}

impl ClassTemplate {
    fn new(class: usize, class_count: usize) -> Self {
        let hue = class as f64 / class_count as f64;
        // Orientations spread over the full circle so opposite gradients stay distinct.
        let orientation = if class_count <= 16 {
            TAU * class as f64 / class_count as f64
        } else {
            class as f64 * 2.399_963_229_728_653
        };
        Self {
            orientation,
            motif: MOTIFS[class % MOTIFS.len()],
            foreground: hsv_to_rgb(hue, 0.75, 0.9),
            background: hsv_to_rgb(hue + 0.5, 0.35, 0.55),
        }
    }

    fn render(&self, size: usize, rng: &mut ChaCha8Rng) -> Image {
        let n = size as f64;
        let theta = self.orientation + rng.random_range(-PI / 12.0..PI / 12.0);
        let (cos, sin) = (theta.cos(), theta.sin());
        let cx = n / 2.0 + rng.random_range(-0.1..0.1) * n;
        let cy = n / 2.0 + rng.random_range(-0.1..0.1) * n;
        let radius = 0.28 * n * rng.random_range(0.85..1.15);
        let mut fg = self.foreground;
        let mut bg = self.background;
        for c in 0..3 {
            fg[c] += rng.random_range(-0.08..0.08);
            bg[c] += rng.random_range(-0.05..0.05);
        }
        let noise: Vec<f64> = (0..size * size * 3)
            .map(|_| rng.random_range(-0.03..0.03))
            .collect();
        let mut k = 0;
        Image::from_fn(size, size, 3, |x, y, c| {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let t = ((px - n / 2.0) * cos + (py - n / 2.0) * sin) / (n / 2.0);
            let base = bg[c] + 0.3 * t;
            let (u, v) = ((px - cx) / radius, (py - cy) / radius);
            let value = if self.motif.contains(u, v) { fg[c] } else { base };
            let out = value + noise[k];
            k += 1;
            out
        })
        .expect("synthetic samples are clamped")
    }
}

/// Generates `per_class` images for each of `class_count` classes.
///
/// Each class has a fixed gradient orientation, motif and palette; samples
/// jitter orientation, motif position/scale and colors, plus faint pixel
/// noise. Images are grouped by class; image `i` of class `c` has id
/// `c{c}_{i}`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> LabeledDataset {
    assert!(
        spec.class_count > 0 && spec.per_class > 0 && spec.image_size > 0,
        "synthetic spec fields must be positive"
    );
    let seed = derive_seed(spec.rng_seed, 0x5359_4e54);
    let mut images = Vec::with_capacity(spec.class_count * spec.per_class);
    let (mut labels, mut sources) = (Vec::new(), Vec::new());
    for class in 0..spec.class_count {
        let template = ClassTemplate::new(class, spec.class_count);
        for i in 0..spec.per_class {
            let mut rng = sample_rng(seed, (class * spec.per_class + i) as u64);
            let id = format!("c{class}_{i}");
            images.push(template.render(spec.image_size, &mut rng).with_id(id.clone()));
            labels.push(class);
            sources.push(id);
        }
    }
    let class_names = (0..spec.class_count).map(|c| format!("class{c}")).collect();
    LabeledDataset::new(images, labels, class_names, Split::Train, sources)
        .expect("generated dataset is consistent")
}

/// Uniform i.i.d. noise image.
pub fn noise_image(width: usize, height: usize, channels: usize, rng: &mut impl Rng) -> Image {
    Image::from_fn(width, height, channels, |_, _, _| rng.random::<f64>())
        .expect("noise samples lie in [0, 1)")
}

/// Endless source of independent uniform-noise images.
pub struct NoiseSampler {
    width: usize,
    height: usize,
    channels: usize,
    rng: ChaCha8Rng,
}

impl NoiseSampler {
    pub fn new(width: usize, height: usize, channels: usize, rng: ChaCha8Rng) -> Self {
        Self {
            width,
            height,
            channels,
            rng,
        }
    }

    pub fn sample(&mut self) -> Image {
        noise_image(self.width, self.height, self.channels, &mut self.rng)
    }
}
