//! Experiment implementations. Each writes per-replicate CSVs under
//! `replicates/rep_XXXX/` and an `aggregate.csv` in the output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sspe::model::{Param, Theta};

use crate::config::{ExperimentConfig, ExperimentId};
use crate::runner::{partition, replicate_runner, Failure};

mod bayes;
mod custom;
mod ml;
mod smoothing;

/// Observations and, when simulated, the latent states.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub states: Option<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn horizon(&self) -> usize {
        self.y.len() - 1
    }

    /// `y_{0:t}`.
    pub fn prefix(&self, t: usize) -> &[f64] {
        &self.y[..=t]
    }
}

/// What an experiment hands back to the run metadata.
#[derive(Debug, Default)]
pub struct Report {
    pub failures: Vec<Failure>,
    pub warnings: BTreeMap<String, u64>,
    pub oracle: BTreeMap<String, Value>,
}

impl Report {
    pub fn warn(&mut self, key: &str, count: u64) {
        if count > 0 {
            *self.warnings.entry(key.to_string()).or_default() += count;
        }
    }
}

/// Fatal error of an experiment (as opposed to a replicate failure).
#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Model(#[from] sspe::Error),
    #[error("writing results: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Setup(String),
}

pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub data: &'a Dataset,
    pub out: &'a Path,
}

impl Context<'_> {
    pub fn replicate_file(&self, r: usize, name: &str) -> PathBuf {
        self.out.join("replicates").join(format!("rep_{r:04}")).join(name)
    }

    pub fn aggregate_path(&self) -> PathBuf {
        self.out.join("aggregate.csv")
    }

    /// Runs `job` for every replicate and splits the outcomes.
    pub fn run_replicates<T: Send>(
        &self,
        job: impl Fn(usize, u64) -> Result<T, String> + Sync,
    ) -> (Vec<(usize, T)>, Vec<Failure>) {
        partition(replicate_runner(self.cfg.replicates, self.cfg.seed, self.cfg.parallelism, job))
    }
}

pub fn run(ctx: &Context) -> Result<Report, ExperimentError> {
    match ctx.cfg.experiment {
        ExperimentId::SmoothingBiasVar => smoothing::run(ctx),
        ExperimentId::OfflineEm => ml::offline(ctx),
        ExperimentId::OnlineEm => ml::online(ctx),
        ExperimentId::Degeneracy => bayes::degeneracy(ctx),
        ExperimentId::PosteriorMcmcSmc => bayes::posterior(ctx),
        ExperimentId::PgibbsCompare => bayes::pgibbs_compare(ctx),
        ExperimentId::Custom => custom::run(ctx),
    }
}

/// Maps any displayable error into a replicate failure message.
pub(crate) fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Columns of the free parameters, in `(rho, tau2, sigma2)` order.
pub(crate) fn free_params(theta: &Theta) -> Vec<Param> {
    theta.free.free_params()
}

pub(crate) fn to_json(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}
