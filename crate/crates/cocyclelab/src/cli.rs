//! Command-line entry point.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use crate::config::{ExperimentConfig, Kind};
use crate::error::LabError;
use crate::experiments::{run, Outcome};
use crate::output::{sha256_hex, Manifest};

#[derive(Debug, Parser)]
#[command(name = "cocyclelab", version, about = "Run finite-scale Lyapunov exponent experiments")]
pub struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    pub kind: Kind,
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads for grid evaluations; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for randomized perturbations; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn run_with_threads(cli: &Cli, cfg: &ExperimentConfig) -> Result<(Outcome, usize), LabError> {
    match cli.threads {
        Some(0) => Err(LabError::Config("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
            Ok((pool.install(|| run(cli.kind, cfg, cli.seed))?, n))
        }
        None => Ok((run(cli.kind, cfg, cli.seed)?, rayon::current_num_threads())),
    }
}

/// Runs one experiment and writes its CSV files and manifest into `--out`.
pub fn execute(cli: &Cli) -> Result<Manifest, LabError> {
    let start = Instant::now();
    let bytes = fs::read(&cli.config)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| LabError::Config(format!("config is not UTF-8: {e}")))?;
    let cfg = ExperimentConfig::from_json(text)?;
    let (outcome, threads) = run_with_threads(cli, &cfg)?;
    fs::create_dir_all(&cli.out)?;
    let mut outputs = Vec::new();
    for t in &outcome.tables {
        t.write(&cli.out)?;
        outputs.push(format!("{}.csv", t.name));
    }
    let manifest = Manifest {
        experiment: cli.kind.name().to_string(),
        config_sha256: sha256_hex(&bytes),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: outcome.seed,
        threads,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs,
        verdicts: outcome.verdicts,
    };
    manifest.write(&cli.out)?;
    Ok(manifest)
}
