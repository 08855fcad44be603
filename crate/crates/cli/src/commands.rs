use std::path::{Path, PathBuf};

use phlab_core::attacks::{
    evade, extract_class, genetic_near_collision, AttackError, HashOracle,
};
use phlab_core::datasets::{generate_synthetic, load_directory, DatasetError, LabeledDataset, SyntheticSpec};
use phlab_core::experiments::{
    emit_report, run_averaged_sweep, run_collision_eval, run_evasion_eval, run_extraction_eval,
    run_uniformity, ExperimentError, ExperimentReport,
};
use phlab_core::imaging::{read_image, write_ppm};
use phlab_core::{BinaryHash, Defense, Image, ImageError, Pipeline, PipelineError};

use crate::config::{CliConfig, Settings};
use crate::{AttackCommand, DataArgs, ExperimentArgs, ExperimentName, Failure};

impl From<ImageError> for Failure {
    fn from(e: ImageError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::HashFormat(_) | PipelineError::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<AttackError> for Failure {
    fn from(e: AttackError) -> Self {
        match e {
            AttackError::Image(e) => e.into(),
            AttackError::Pipeline(e) => e.into(),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(_) => Failure::Usage(e.to_string()),
            ExperimentError::Attack(e) => e.into(),
            ExperimentError::Pipeline(e) => e.into(),
            ExperimentError::Image(e) => e.into(),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn pipeline(cfg: &CliConfig, defense: Defense) -> Result<Pipeline, Failure> {
    Ok(Pipeline::new(cfg.pipeline.clone().with_defense(defense))?)
}

pub fn hash(images: &[PathBuf], cfg: &CliConfig) -> Result<(), Failure> {
    let p = pipeline(cfg, cfg.pipeline.defense)?;
    for path in images {
        let img = read_image(path)?;
        let out = p.hash_output(&img)?;
        match cfg.pipeline.defense {
            Defense::None => println!("{}  {}", out.emitted, path.display()),
            Defense::ShaAtTheEnd => println!(
                "{}  {} (perceptual {})",
                out.emitted,
                path.display(),
                out.perceptual
            ),
        }
    }
    Ok(())
}

fn dataset(data: &DataArgs, cfg: &CliConfig, per_class: usize) -> Result<LabeledDataset, Failure> {
    match &data.data {
        Some(dir) => Ok(load_directory(dir)?.preprocessed(&cfg.pipeline.preprocess)),
        None => Ok(generate_synthetic(&SyntheticSpec {
            per_class,
            ..cfg.synthetic
        })),
    }
}

fn target_hash(
    hex: Option<&str>,
    image: Option<&Path>,
    oracle: &Pipeline,
) -> Result<Option<BinaryHash>, Failure> {
    match (hex, image) {
        (Some(h), _) => Ok(Some(h.parse()?)),
        (None, Some(path)) => Ok(Some(oracle.query(&read_image(path)?)?)),
        (None, None) => Ok(None),
    }
}

fn write_output(img: &Image, path: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = path {
        write_ppm(img, path)?;
    }
    Ok(())
}

/// Appends the CLI settings to the report's config and writes it.
fn finish(mut report: ExperimentReport, settings: &Settings, out: Option<&Path>) -> Result<(), Failure> {
    let Some(out) = out else {
        return Ok(());
    };
    for (k, v) in settings.snapshot() {
        if report.config_value(&k).is_none() {
            report.config.push((k, v));
        }
    }
    emit_report(&report, out)?;
    Ok(())
}

pub fn attack(cmd: AttackCommand, cfg: &CliConfig, settings: &Settings) -> Result<(), Failure> {
    let oracle = pipeline(cfg, cfg.pipeline.defense)?;
    match cmd {
        AttackCommand::Evade {
            source,
            carrier,
            grid_step,
            output,
            out,
        } => {
            let (x, x0) = (read_image(&source)?, read_image(&carrier)?);
            let r = evade(&x, &x0, &oracle, grid_step)?;
            println!(
                "alpha* {} ssim {:.6} evaded {} queries {}",
                r.alpha_star, r.ssim_to_source, r.evaded, r.queries
            );
            write_output(&r.adversarial_image, output.as_deref())?;
            let mut report = ExperimentReport::new(
                "attack_evade",
                &["source", "carrier", "alpha_star", "ssim", "evaded", "queries"],
            )
            .with_config("grid_step", grid_step);
            report.rows.push(vec![
                source.display().to_string(),
                carrier.display().to_string(),
                r.alpha_star.to_string(),
                r.ssim_to_source.to_string(),
                r.evaded.to_string(),
                r.queries.to_string(),
            ]);
            finish(report, settings, out.as_deref())
        }
        AttackCommand::Collide {
            target_hash: hex,
            target,
            data,
            per_class,
            output,
            out,
        } => {
            let target = target_hash(hex.as_deref(), target.as_deref(), &oracle)?
                .ok_or_else(|| Failure::Usage("collide needs --target-hash or --target".into()))?;
            let db = dataset(&data, cfg, per_class)?.take_per_class(per_class);
            let r = genetic_near_collision(&target, &db.images, &oracle, &cfg.genetic)?;
            println!("best fitness {:.6} after {} queries", r.fitness, r.queries);
            write_output(&r.image, output.as_deref())?;
            let mut report = ExperimentReport::new(
                "attack_collide",
                &["target", "fitness", "queries", "weights"],
            )
            .with_config("database", db.len());
            report.rows.push(vec![
                target.to_string(),
                r.fitness.to_string(),
                r.queries.to_string(),
                r.weights.to_string(),
            ]);
            finish(report, settings, out.as_deref())
        }
        AttackCommand::Extract {
            target_hash: hex,
            target,
            data,
            out,
        } => {
            let ds = dataset(&data, cfg, cfg.synthetic.per_class)?;
            match target_hash(hex.as_deref(), target.as_deref(), &oracle)? {
                Some(h) => {
                    let db: Vec<BinaryHash> = ds
                        .images
                        .iter()
                        .map(|img| oracle.query(img))
                        .collect::<Result<_, _>>()?;
                    let r = extract_class(&h, &db, &ds.labels, &cfg.extraction)?;
                    println!(
                        "predicted {} (support {:.4})",
                        ds.class_names[r.predicted_class], r.support[r.predicted_class]
                    );
                    let mut report =
                        ExperimentReport::new("attack_extract", &["target", "predicted", "support"]);
                    report.rows.push(vec![
                        h.to_string(),
                        ds.class_names[r.predicted_class].clone(),
                        r.support[r.predicted_class].to_string(),
                    ]);
                    finish(report, settings, out.as_deref())
                }
                None => {
                    let (train, test) = ds.split();
                    if test.is_empty() {
                        return Err(Failure::Data("need at least 2 images per class to score".into()));
                    }
                    let report = run_extraction_eval(&train, &test, &cfg.extraction, &oracle)?;
                    let acc = report.aggregate("accuracy").map_or(f64::NAN, |s| s.mean);
                    println!("accuracy {acc:.4} over {} targets", test.len());
                    finish(report, settings, out.as_deref())
                }
            }
        }
    }
}

/// Sample counts for one experiment scale.
struct Scale {
    sweep_pairs: usize,
    uniformity_pairs: usize,
    evasion_pairs: usize,
    collision_targets: usize,
    extraction_targets: usize,
}

const DESK: Scale = Scale {
    sweep_pairs: 50,
    uniformity_pairs: 1000,
    evasion_pairs: 200,
    collision_targets: 3,
    extraction_targets: 20,
};

const FULL: Scale = Scale {
    sweep_pairs: 1000,
    uniformity_pairs: 10_000,
    evasion_pairs: 10_000,
    collision_targets: 15,
    extraction_targets: 100,
};

const COLLISION_DB_PER_CLASS: usize = 10;
const EXTRACTION_TRAIN_PER_CLASS: usize = 50;

fn headline(report: &ExperimentReport, metrics: &[&str], out: &Path) {
    let parts: Vec<String> = metrics
        .iter()
        .filter_map(|m| {
            report
                .aggregate(m)
                .map(|s| format!("{m} {:.4} ± {:.4} (n={})", s.mean, s.ci95, s.n))
        })
        .collect();
    println!("{}: {} -> {}", report.name, parts.join(", "), out.display());
}

pub fn experiment(args: ExperimentArgs, cfg: &CliConfig, settings: &Settings) -> Result<(), Failure> {
    let scale = if args.full_scale { FULL } else { DESK };
    let seed = cfg.seed;
    let out = args.out.as_path();
    let emit = |report: ExperimentReport, metrics: &[&str]| -> Result<(), Failure> {
        headline(&report, metrics, out);
        finish(report, settings, Some(out))
    };
    let targets = args.targets_per_class;
    let collision = |defense: Defense| -> Result<ExperimentReport, Failure> {
        let t = targets.unwrap_or(scale.collision_targets);
        let ds = dataset(&args.data, cfg, COLLISION_DB_PER_CLASS + t)?;
        let (train, tgt) = (
            ds.slice_per_class(0..COLLISION_DB_PER_CLASS),
            ds.slice_per_class(COLLISION_DB_PER_CLASS..COLLISION_DB_PER_CLASS + t),
        );
        Ok(run_collision_eval(&train, &tgt, &cfg.genetic, &pipeline(cfg, defense)?)?)
    };
    let extraction = |defense: Defense| -> Result<ExperimentReport, Failure> {
        let t = targets.unwrap_or(scale.extraction_targets);
        let ds = dataset(&args.data, cfg, EXTRACTION_TRAIN_PER_CLASS + t)?;
        let (train, test) = (
            ds.slice_per_class(0..EXTRACTION_TRAIN_PER_CLASS),
            ds.slice_per_class(EXTRACTION_TRAIN_PER_CLASS..EXTRACTION_TRAIN_PER_CLASS + t),
        );
        Ok(run_extraction_eval(&train, &test, &cfg.extraction, &pipeline(cfg, defense)?)?)
    };
    let defense = cfg.pipeline.defense;
    match args.name {
        ExperimentName::Sweep => {
            let ds = dataset(&args.data, cfg, cfg.synthetic.per_class)?;
            let pairs = args.pairs.unwrap_or(scale.sweep_pairs);
            let r = run_averaged_sweep(&ds, pairs, args.steps, &pipeline(cfg, defense)?, seed)?;
            emit(r, &["sim_to_x1_mid", "sim_adjacent_mid"])
        }
        ExperimentName::Uniformity => {
            let p = cfg.pipeline.preprocess;
            let shape = (p.target_width, p.target_height, p.channels());
            let pairs = args.pairs.unwrap_or(scale.uniformity_pairs);
            let r = run_uniformity(pairs, shape, &pipeline(cfg, defense)?, seed)?;
            emit(r, &["similarity"])
        }
        ExperimentName::Evasion => {
            let ds = dataset(&args.data, cfg, cfg.synthetic.per_class)?;
            let pairs = args.pairs.unwrap_or(scale.evasion_pairs);
            let r = run_evasion_eval(&ds, pairs, args.grid_step, &pipeline(cfg, defense)?, seed)?;
            emit(r, &["success_rate", "ssim"])
        }
        ExperimentName::Collision => emit(collision(defense)?, &["fitness", "baseline"]),
        ExperimentName::Extraction => emit(extraction(defense)?, &["accuracy"]),
        ExperimentName::Defense => {
            for d in [Defense::None, Defense::ShaAtTheEnd] {
                let mut r = collision(d)?;
                r.name = format!("collision_{d}");
                emit(r, &["fitness", "baseline"])?;
                let mut r = extraction(d)?;
                r.name = format!("extraction_{d}");
                emit(r, &["accuracy"])?;
            }
            let ds = dataset(&args.data, cfg, cfg.synthetic.per_class)?;
            let pairs = args.pairs.unwrap_or(scale.sweep_pairs);
            let p = pipeline(cfg, Defense::ShaAtTheEnd)?;
            let mut r = run_averaged_sweep(&ds, pairs, args.steps, &p, seed)?;
            r.name = "sweep_sha".into();
            emit(r, &["sim_to_x1_mid"])
        }
    }
}
