//! `phlab`: hash images, run attacks, and reproduce experiments.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O or data error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Settings;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "phlab", version, about = "Perceptual hashing security lab")]
struct Cli {
    /// Master seed; every random quantity derives from it [default: 42]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: machine parallelism)
    #[arg(long, global = true, env = "PHLAB_THREADS")]
    threads: Option<usize>,
    /// Config file of `key = value` lines
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one config key; repeatable
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Defense stage appended to the hash: none | sha
    #[arg(long, global = true)]
    defense: Option<String>,
    /// Embedder: tanh | linear | path to a feature file
    #[arg(long, global = true)]
    embedder: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the hash of each image
    Hash {
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Run one attack
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Reproduce an experiment and write its reports
    Experiment(ExperimentArgs),
    /// Print the effective configuration
    ShowConfig,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Labeled image directory (`root/<class>/<images>`); synthetic data when absent
    #[arg(long, value_name = "DIR")]
    data: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum AttackCommand {
    /// Blend a carrier into a source until the hash changes
    Evade {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        carrier: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        /// Write the adversarial image here (PPM/PGM)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Report directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search interpolations of a database for a near-collision
    Collide {
        #[arg(long, conflicts_with = "target", required_unless_present = "target")]
        target_hash: Option<String>,
        /// Image whose hash is the target
        #[arg(long)]
        target: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        /// Database images per class
        #[arg(long, default_value_t = 10)]
        per_class: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infer a class from a hash; without a target, score a held-out split
    Extract {
        #[arg(long, conflicts_with = "target")]
        target_hash: Option<String>,
        #[arg(long)]
        target: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Sweep,
    Uniformity,
    Evasion,
    Collision,
    Extraction,
    Defense,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    name: ExperimentName,
    /// Pairs for sweep, uniformity and evasion
    #[arg(long)]
    pairs: Option<usize>,
    /// Targets per class for collision, extraction and defense
    #[arg(long)]
    targets_per_class: Option<usize>,
    /// Use full-scale sample counts instead of desk-scale ones
    #[arg(long)]
    full_scale: bool,
    /// Interpolation points per sweep, endpoints included
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Evasion scan step
    #[arg(long, default_value_t = 0.01)]
    grid_step: f64,
    #[command(flatten)]
    data: DataArgs,
    /// Report directory
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let mut s = Settings::default();
    if let Some(path) = &cli.config {
        s.load_file(path)?;
    }
    for pair in &cli.set {
        s.set_pair(pair)?;
    }
    if let Some(seed) = cli.seed {
        s.set("seed", &seed.to_string())?;
    }
    if let Some(threads) = cli.threads {
        s.set("threads", &threads.to_string())?;
    }
    if let Some(d) = &cli.defense {
        s.set("defense", d)?;
    }
    if let Some(e) = &cli.embedder {
        s.set("embedder", e)?;
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let settings = settings(&cli)?;
    let cfg = settings.resolve()?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Hash { images } => commands::hash(&images, &cfg),
        Command::Attack(cmd) => commands::attack(cmd, &cfg, &settings),
        Command::Experiment(args) => commands::experiment(args, &cfg, &settings),
        Command::ShowConfig => {
            print!("{}", settings.describe());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("phlab: {f}");
            ExitCode::from(f.code())
        }
    }
}
