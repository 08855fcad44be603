use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use super::{ExperimentError, ExperimentReport, Summary};
use super::report::{Bar, Chart, Series};
use crate::attacks::HashOracle;
use crate::datasets::{noise_image, LabeledDataset};
use crate::imaging::{interpolate, Image};
use crate::pipeline::{hamming_similarity, BinaryHash};
use crate::rng::sample_rng;

/// α values in `[MID_ALPHA.0, MID_ALPHA.1]` count as mid-range.
pub const MID_ALPHA: (f64, f64) = (0.25, 0.75);

/// Hash similarities along the straight line `I_α = α x1 + (1 - α) x2`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationSweep {
    pub alphas: Vec<f64>,
    pub sim_to_x1: Vec<f64>,
    pub sim_to_x2: Vec<f64>,
    /// `sim_adjacent[i]` compares the hashes at `alphas[i]` and `alphas[i + 1]`.
    pub sim_adjacent: Vec<f64>,
}

pub fn alpha_steps(steps: usize) -> Vec<f64> {
    (0..steps).map(|i| i as f64 / (steps - 1) as f64).collect()
}

pub fn run_interpolation_sweep<O: HashOracle + ?Sized>(
    x1: &Image,
    x2: &Image,
    steps: usize,
    oracle: &O,
) -> Result<InterpolationSweep, ExperimentError> {
    if steps < 2 {
        return Err(ExperimentError::Config(format!("a sweep needs at least 2 steps, got {steps}")));
    }
    x1.check_same_shape(x2)?;
    let alphas = alpha_steps(steps);
    let hashes = alphas
        .iter()
        .map(|&a| Ok(oracle.query(&interpolate(x1, x2, a)?)?))
        .collect::<Result<Vec<BinaryHash>, ExperimentError>>()?;
    let (h1, h2) = (oracle.query(x1)?, oracle.query(x2)?);
    Ok(InterpolationSweep {
        sim_to_x1: hashes.iter().map(|h| hamming_similarity(h, &h1)).collect(),
        sim_to_x2: hashes.iter().map(|h| hamming_similarity(h, &h2)).collect(),
        sim_adjacent: hashes.windows(2).map(|w| hamming_similarity(&w[0], &w[1])).collect(),
        alphas,
    })
}

/// Two distinct uniformly chosen indices below `n`.
pub(crate) fn sample_pair(n: usize, rng: &mut impl Rng) -> (usize, usize) {
    let idx = sample(rng, n, 2);
    (idx.index(0), idx.index(1))
}

fn mid_mean(alphas: &[f64], values: &[f64]) -> f64 {
    let mid: Vec<f64> = alphas
        .iter()
        .zip(values)
        .filter(|(a, _)| (MID_ALPHA.0..=MID_ALPHA.1).contains(*a))
        .map(|(_, v)| *v)
        .collect();
    mid.iter().sum::<f64>() / mid.len() as f64
}

/// Averages sweeps over `pairs` random image pairs.
///
/// CSV columns: `pair,x1,x2,alpha,sim_to_x1,sim_to_x2,sim_adjacent`, one row per
/// pair and α (`sim_adjacent` is empty on the last α). Aggregates `*_mid` are
/// per-pair means over mid-range α; the chart shows per-α means with 99% CIs.
pub fn run_averaged_sweep<O: HashOracle + ?Sized>(
    ds: &LabeledDataset,
    pairs: usize,
    steps: usize,
    oracle: &O,
    seed: u64,
) -> Result<ExperimentReport, ExperimentError> {
    if ds.len() < 2 {
        return Err(ExperimentError::Config("a sweep needs at least 2 images".into()));
    }
    let sweeps = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let (a, b) = sample_pair(ds.len(), &mut sample_rng(seed, i as u64));
            let sweep = run_interpolation_sweep(&ds.images[a], &ds.images[b], steps, oracle)?;
            Ok((a, b, sweep))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let mut report = ExperimentReport::new(
        "sweep",
        &["pair", "x1", "x2", "alpha", "sim_to_x1", "sim_to_x2", "sim_adjacent"],
    )
    .with_config("pairs", pairs)
    .with_config("steps", steps)
    .with_config("seed", seed);
    for (i, (a, b, s)) in sweeps.iter().enumerate() {
        for k in 0..s.alphas.len() {
            report.rows.push(vec![
                i.to_string(),
                ds.sources[*a].clone(),
                ds.sources[*b].clone(),
                s.alphas[k].to_string(),
                s.sim_to_x1[k].to_string(),
                s.sim_to_x2[k].to_string(),
                s.sim_adjacent.get(k).map_or(String::new(), f64::to_string),
            ]);
        }
    }

    let alphas = alpha_steps(steps);
    type Field = fn(&InterpolationSweep) -> &Vec<f64>;
    let fields: [(&str, Field); 3] = [
        ("sim_to_x1", |s| &s.sim_to_x1),
        ("sim_to_x2", |s| &s.sim_to_x2),
        ("sim_adjacent", |s| &s.sim_adjacent),
    ];
    let mut series = Vec::new();
    for (name, field) in fields {
        let per_pair: Vec<f64> = sweeps
            .iter()
            .map(|(_, _, s)| mid_mean(&alphas, field(s)))
            .collect();
        report.push_aggregate(format!("{name}_mid"), &per_pair);
        let len = sweeps.first().map_or(0, |(_, _, s)| field(s).len());
        let points = (0..len)
            .map(|k| {
                let at_k: Vec<f64> = sweeps.iter().map(|(_, _, s)| field(s)[k]).collect();
                let sum = Summary::of(&at_k);
                (alphas[k], sum.mean, sum.ci99)
            })
            .collect();
        series.push(Series {
            name: name.to_string(),
            points,
        });
    }
    report.chart = Chart::Lines {
        x_label: "alpha".into(),
        y_label: "Hamming similarity".into(),
        series,
    };
    Ok(report)
}

/// Hash similarity between independent uniform-noise images of the given shape.
///
/// CSV columns: `pair,similarity`. The chart is a histogram of similarities.
pub fn run_uniformity<O: HashOracle + ?Sized>(
    pairs: usize,
    shape: (usize, usize, usize),
    oracle: &O,
    seed: u64,
) -> Result<ExperimentReport, ExperimentError> {
    let (w, h, c) = shape;
    let sims = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let x1 = noise_image(w, h, c, &mut rng);
            let x2 = noise_image(w, h, c, &mut rng);
            Ok(hamming_similarity(&oracle.query(&x1)?, &oracle.query(&x2)?))
        })
        .collect::<Result<Vec<f64>, ExperimentError>>()?;

    let mut report = ExperimentReport::new("uniformity", &["pair", "similarity"])
        .with_config("pairs", pairs)
        .with_config("shape", format!("{w}x{h}x{c}"))
        .with_config("seed", seed);
    report.rows = sims
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i.to_string(), s.to_string()])
        .collect();
    report.push_aggregate("similarity", &sims);

    // Bins of width 0.05 over [0.3, 0.7]; outliers land in the end bins.
    let mut counts = [0usize; 8];
    for s in &sims {
        let bin = ((s - 0.3) / 0.05).floor().clamp(0.0, 7.0) as usize;
        counts[bin] += 1;
    }
    report.chart = Chart::Bars {
        y_label: "fraction of pairs".into(),
        bars: counts
            .iter()
            .enumerate()
            .map(|(i, &n)| Bar {
                label: format!("{:.2}", 0.3 + 0.05 * i as f64),
                value: n as f64 / pairs.max(1) as f64,
                half_width: 0.0,
            })
            .collect(),
    };
    Ok(report)
}
