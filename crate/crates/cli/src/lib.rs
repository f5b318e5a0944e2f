//! Experiment harness for the `sspe` particle methods.
//!
//! `sspe <experiment-id> --config <path> --seed <int> --out <dir>` runs one
//! experiment: it loads (or simulates) the data, computes the Kalman or grid
//! reference values, runs the replicates with bounded parallelism and writes
//!
//! * `data.csv`: the data set (`t,x,y`, or `t,y` for ingested observations);
//! * `replicates/rep_XXXX/*.csv`: per-replicate outputs;
//! * `aggregate.csv`: one row per plotted point, with the reference column;
//! * `metadata.json`: the resolved config, seeds, timings and counters;
//! * `failures.csv`: only when some replicate failed.
//!
//! Exit status is 0 on success, 1 when any replicate (or the run) failed and
//! 2 for configuration errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;
use sspe::model::simulate_lgssm;
use sspe::rng::replicate_seed;

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod config;
pub mod experiments;
pub mod io;
pub mod oracle;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, ExperimentId, Overrides};
pub use experiments::Dataset;
pub use runner::{replicate_runner, Failure, Outcome};

#[derive(Debug, Parser)]
#[command(name = "sspe", version, about = "Run a particle-method experiment")]
pub struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: ExperimentId,
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed.
    #[arg(long)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Maximum number of replicates run concurrently.
    #[arg(long)]
    pub parallelism: Option<usize>,
}

impl Args {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: Some(self.seed),
            out: Some(self.out.clone()),
            replicates: self.replicates,
            parallelism: self.parallelism,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("observations: {0}")]
    Data(#[from] io::DataError),
    #[error("output directory: {0}")]
    Output(std::io::Error),
    #[error("{0}")]
    Fatal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Fatal(_) => 1,
            _ => 2,
        }
    }
}

/// Everything needed to reproduce a run or any single replicate of it:
/// replicate `r` depends only on `config` and `replicate_seeds[r]`.
#[derive(Debug, Serialize)]
pub struct RunMetadata {
    pub config: ExperimentConfig,
    /// Keys that took their documented defaults.
    pub defaulted: Vec<String>,
    pub code_version: String,
    pub data_source: String,
    pub data_seed: Option<u64>,
    pub replicate_seeds: Vec<u64>,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub completed_replicates: usize,
    pub failed_replicates: Vec<Failure>,
    pub warnings: BTreeMap<String, u64>,
    pub oracle: BTreeMap<String, serde_json::Value>,
}

/// Outcome of a run that got as far as the replicates.
#[derive(Debug)]
pub struct RunSummary {
    pub metadata: RunMetadata,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.metadata.failed_replicates.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Loads the observations or simulates `y_{0:T}` for the largest configured
/// horizon. Ingested data replace defaulted horizons by the data horizon.
pub fn prepare_data(cfg: &mut ExperimentConfig, defaulted: &[String]) -> Result<(Dataset, Option<u64>), RunError> {
    match &cfg.observations {
        Some(path) => {
            let y = io::read_observations_file(path)?;
            let horizon = y.len() - 1;
            if defaulted.iter().any(|k| k == "algorithm.t") {
                cfg.algorithm.t = vec![horizon];
            }
            if let Some(t) = cfg.algorithm.t.iter().find(|&&t| t > horizon) {
                return Err(
                    ConfigError::Invalid(format!("horizon {t} exceeds the {horizon} of the observations")).into()
                );
            }
            Ok((Dataset { states: None, y }, None))
        }
        None => {
            let horizon = *cfg.algorithm.t.iter().max().unwrap();
            let theta = cfg.theta().map_err(|e| ConfigError::Invalid(e.to_string()))?;
            let traj = simulate_lgssm(&theta, cfg.initial_law(), horizon, cfg.seed)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            Ok((Dataset { states: Some(traj.states), y: traj.observations }, Some(cfg.seed)))
        }
    }
}

/// Runs a resolved configuration and writes every output file.
pub fn run_experiment(mut cfg: ExperimentConfig, defaulted: Vec<String>) -> Result<RunSummary, RunError> {
    let clock = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let (data, data_seed) = prepare_data(&mut cfg, &defaulted)?;
    let out = cfg.out.clone();
    std::fs::create_dir_all(&out).map_err(RunError::Output)?;
    io::write_file(&out.join("data.csv"), |w| match &data.states {
        Some(x) => sspe::io::write_trajectory(w, x, &data.y),
        None => io::write_observations(w, &data.y),
    })
    .map_err(RunError::Output)?;

    let ctx = experiments::Context { cfg: &cfg, data: &data, out: &out };
    let report = experiments::run(&ctx).map_err(|e| RunError::Fatal(e.to_string()))?;
    if !report.failures.is_empty() {
        runner::write_failure_manifest(&out.join("failures.csv"), &report.failures)
            .map_err(|e| RunError::Fatal(e.to_string()))?;
    }
    let metadata = RunMetadata {
        data_source: match &cfg.observations {
            Some(p) => p.display().to_string(),
            None => "simulated".into(),
        },
        data_seed,
        replicate_seeds: (0..cfg.replicates as u64).map(|r| replicate_seed(cfg.seed, r)).collect(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        completed_replicates: cfg.replicates - report.failures.len(),
        failed_replicates: report.failures,
        warnings: report.warnings,
        oracle: report.oracle,
        defaulted,
        config: cfg,
    };
    io::write_file(&out.join("metadata.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &metadata).map_err(std::io::Error::other)?;
        std::io::Write::write_all(w, b"\n")
    })
    .map_err(|e| RunError::Fatal(e.to_string()))?;
    Ok(RunSummary { metadata })
}

/// Parses, runs and maps the outcome to an exit status.
pub fn run(args: &Args) -> i32 {
    let loaded = ExperimentConfig::load(&args.config, args.experiment, &args.overrides());
    let result = loaded.map_err(RunError::from).and_then(|(cfg, defaulted)| run_experiment(cfg, defaulted));
    match result {
        Ok(summary) => {
            for f in &summary.metadata.failed_replicates {
                eprintln!("replicate {} (seed {}) failed: {}", f.replicate, f.seed, f.error);
            }
            summary.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
