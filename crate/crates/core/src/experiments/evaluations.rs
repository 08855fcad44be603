use rayon::prelude::*;

use super::report::{Bar, Chart, Series};
use super::sweep::sample_pair;
use super::{ExperimentError, ExperimentReport, Summary};
use crate::attacks::{
    baseline_max_similarity, evade, extract_class, genetic_near_collision, ExtractionConfig,
    GeneticConfig, HashOracle,
};
use crate::datasets::{LabeledDataset, NoiseSampler};
use crate::imaging::Image;
use crate::pipeline::BinaryHash;
use crate::rng::{derive_seed, sample_rng};

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub(crate) fn hash_all<O: HashOracle + ?Sized>(
    images: &[Image],
    oracle: &O,
) -> Result<Vec<BinaryHash>, ExperimentError> {
    images
        .par_iter()
        .map(|img| Ok(oracle.query(img)?))
        .collect()
}

/// Interpolation evasion on `pairs` random (source, carrier) pairs.
///
/// CSV columns: `pair,source,carrier,alpha_star,ssim,evaded,queries`.
pub fn run_evasion_eval<O: HashOracle + ?Sized>(
    ds: &LabeledDataset,
    pairs: usize,
    grid_step: f64,
    oracle: &O,
    seed: u64,
) -> Result<ExperimentReport, ExperimentError> {
    if ds.len() < 2 {
        return Err(ExperimentError::Config("evasion needs at least 2 images".into()));
    }
    let results = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let (s, c) = sample_pair(ds.len(), &mut sample_rng(seed, i as u64));
            Ok((s, c, evade(&ds.images[s], &ds.images[c], oracle, grid_step)?))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let mut report = ExperimentReport::new(
        "evasion",
        &["pair", "source", "carrier", "alpha_star", "ssim", "evaded", "queries"],
    )
    .with_config("pairs", pairs)
    .with_config("grid_step", grid_step)
    .with_config("seed", seed);
    for (i, (s, c, r)) in results.iter().enumerate() {
        report.rows.push(vec![
            i.to_string(),
            ds.sources[*s].clone(),
            ds.sources[*c].clone(),
            r.alpha_star.to_string(),
            r.ssim_to_source.to_string(),
            r.evaded.to_string(),
            r.queries.to_string(),
        ]);
    }
    let success: Vec<f64> = results.iter().map(|r| indicator(r.2.evaded)).collect();
    let ssim: Vec<f64> = results.iter().map(|r| r.2.ssim_to_source).collect();
    let alpha: Vec<f64> = results.iter().map(|r| r.2.alpha_star).collect();
    let success = report.push_aggregate("success_rate", &success);
    let ssim = report.push_aggregate("ssim", &ssim);
    report.push_aggregate("alpha_star", &alpha);
    report.chart = Chart::Bars {
        y_label: "mean (95% CI)".into(),
        bars: vec![
            Bar {
                label: "success rate".into(),
                value: success.mean,
                half_width: success.ci95,
            },
            Bar {
                label: "SSIM".into(),
                value: ssim.mean,
                half_width: ssim.ci95,
            },
        ],
    };
    Ok(report)
}

/// Genetic near-collision search against the hash of every image in `targets`,
/// using `train` as the interpolation database, next to the best similarity
/// reached by the same number of queries on uniform-noise images.
///
/// Target `t` runs with seed `derive_seed(cfg.rng_seed, t)`. CSV columns:
/// `target,source,label,fitness,baseline,queries,weights,trajectory` where
/// `trajectory` lists the best fitness after each generation, `;`-separated.
pub fn run_collision_eval<O: HashOracle + ?Sized>(
    train: &LabeledDataset,
    targets: &LabeledDataset,
    cfg: &GeneticConfig,
    oracle: &O,
) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(ExperimentError::Config("empty collision database".into()));
    }
    let (w, h, c) = train.images[0].shape();
    let budget = cfg.query_budget();
    let baseline_seed = derive_seed(cfg.rng_seed, 0x4241_5345);
    let outcomes = (0..targets.len())
        .into_par_iter()
        .map(|t| {
            let target = oracle.query(&targets.images[t])?;
            let run_cfg = GeneticConfig {
                rng_seed: derive_seed(cfg.rng_seed, t as u64),
                ..*cfg
            };
            let out = genetic_near_collision(&target, &train.images, oracle, &run_cfg)?;
            let mut sampler = NoiseSampler::new(w, h, c, sample_rng(baseline_seed, t as u64));
            let baseline = baseline_max_similarity(&target, || sampler.sample(), budget, oracle)?;
            Ok((out, baseline))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let mut report = ExperimentReport::new(
        "collision",
        &["target", "source", "label", "fitness", "baseline", "queries", "weights", "trajectory"],
    )
    .with_config("targets", targets.len())
    .with_config("database", train.len())
    .with_config("population_start", cfg.population_start)
    .with_config("population_end", cfg.population_end)
    .with_config("decay_rate", cfg.decay_rate)
    .with_config("iterations", cfg.iterations)
    .with_config("children_per_iter", cfg.children_per_iter)
    .with_config("mutation_range", cfg.mutation_range)
    .with_config("seed", cfg.rng_seed);
    for (t, (out, baseline)) in outcomes.iter().enumerate() {
        let trajectory: Vec<String> = out.trajectory.iter().map(f64::to_string).collect();
        report.rows.push(vec![
            t.to_string(),
            targets.sources[t].clone(),
            targets.class_names[targets.labels[t]].clone(),
            out.fitness.to_string(),
            baseline.to_string(),
            out.queries.to_string(),
            out.weights.to_string(),
            trajectory.join(";"),
        ]);
    }
    let fitness: Vec<f64> = outcomes.iter().map(|o| o.0.fitness).collect();
    let baseline: Vec<f64> = outcomes.iter().map(|o| o.1).collect();
    let advantage: Vec<f64> = fitness.iter().zip(&baseline).map(|(f, b)| f - b).collect();
    report.push_aggregate("fitness", &fitness);
    let base = report.push_aggregate("baseline", &baseline);
    report.push_aggregate("advantage", &advantage);

    let generations = cfg.iterations + 1;
    let ga_points = (0..generations)
        .map(|g| {
            let at_g: Vec<f64> = outcomes.iter().map(|o| o.0.trajectory[g]).collect();
            let s = Summary::of(&at_g);
            (g as f64, s.mean, s.ci95)
        })
        .collect();
    let base_points = [0.0, cfg.iterations as f64]
        .into_iter()
        .map(|g| (g, base.mean, base.ci95))
        .collect();
    report.chart = Chart::Lines {
        x_label: "generation".into(),
        y_label: "best Hamming similarity".into(),
        series: vec![
            Series {
                name: "genetic".into(),
                points: ga_points,
            },
            Series {
                name: format!("baseline ({budget} queries)"),
                points: base_points,
            },
        ],
    };
    Ok(report)
}

/// Class extraction for every image in `test`, fitted against the hashes of
/// `train`. Test image `i` breaks ties with seed `derive_seed(cfg.rng_seed, i)`.
///
/// CSV columns: `target,source,label,predicted,correct,support` where `support`
/// is the winning class's share of `Σ|p_i|`.
pub fn run_extraction_eval<O: HashOracle + ?Sized>(
    train: &LabeledDataset,
    test: &LabeledDataset,
    cfg: &ExtractionConfig,
    oracle: &O,
) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(ExperimentError::Config("empty extraction database".into()));
    }
    let db = hash_all(&train.images, oracle)?;
    let outcomes = (0..test.len())
        .into_par_iter()
        .map(|i| {
            let target = oracle.query(&test.images[i])?;
            let run_cfg = ExtractionConfig {
                rng_seed: derive_seed(cfg.rng_seed, i as u64),
                ..*cfg
            };
            Ok(extract_class(&target, &db, &train.labels, &run_cfg)?)
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let mut report = ExperimentReport::new(
        "extraction",
        &["target", "source", "label", "predicted", "correct", "support"],
    )
    .with_config("train", train.len())
    .with_config("test", test.len())
    .with_config("epochs", cfg.epochs)
    .with_config("steps_per_epoch", cfg.steps_per_epoch)
    .with_config("learning_rate", cfg.learning_rate)
    .with_config("entropy_epsilon", cfg.entropy_epsilon)
    .with_config("seed", cfg.rng_seed);
    let mut correct = Vec::with_capacity(test.len());
    for (i, out) in outcomes.iter().enumerate() {
        let label = test.labels[i];
        let hit = out.predicted_class == label;
        correct.push(indicator(hit));
        report.rows.push(vec![
            i.to_string(),
            test.sources[i].clone(),
            test.class_names[label].clone(),
            train.class_names[out.predicted_class].clone(),
            hit.to_string(),
            out.support[out.predicted_class].to_string(),
        ]);
    }
    let overall = report.push_aggregate("accuracy", &correct);
    let mut bars = Vec::new();
    for (c, name) in test.class_names.iter().enumerate() {
        let in_class: Vec<f64> = (0..test.len())
            .filter(|&i| test.labels[i] == c)
            .map(|i| correct[i])
            .collect();
        if in_class.is_empty() {
            continue;
        }
        let s = report.push_aggregate(format!("accuracy_{name}"), &in_class);
        bars.push(Bar {
            label: name.clone(),
            value: s.mean,
            half_width: s.ci95,
        });
    }
    bars.push(Bar {
        label: "overall".into(),
        value: overall.mean,
        half_width: overall.ci95,
    });
    report.chart = Chart::Bars {
        y_label: "accuracy (95% CI)".into(),
        bars,
    };
    Ok(report)
}
