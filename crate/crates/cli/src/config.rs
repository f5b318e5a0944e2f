//! Experiment configuration: a TOML document whose keys mirror
//! [`ExperimentConfig`]. Every key is optional; missing keys take the
//! per-experiment defaults of [`ExperimentConfig::defaults`], and the names of
//! the defaulted keys are echoed into the run metadata. Unknown keys are an
//! error.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sspe::bayes::PriorSpec;
use sspe::filter::FilterOptions;
use sspe::ml::Backend;
use sspe::model::{FreeMask, InitialLaw, Param, ProposalKind, Theta};
use sspe::particle::ResamplingScheme;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("config: {0}")]
    Schema(String),
    #[error("config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExperimentId {
    SmoothingBiasVar,
    OfflineEm,
    OnlineEm,
    Degeneracy,
    PosteriorMcmcSmc,
    PgibbsCompare,
    Custom,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::SmoothingBiasVar => "smoothing_bias_var",
            ExperimentId::OfflineEm => "offline_em",
            ExperimentId::OnlineEm => "online_em",
            ExperimentId::Degeneracy => "degeneracy",
            ExperimentId::PosteriorMcmcSmc => "posterior_mcmc_smc",
            ExperimentId::PgibbsCompare => "pgibbs_compare",
            ExperimentId::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Stationary,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Rho,
    Tau2,
    Sigma2,
}

impl ParamName {
    pub fn param(self) -> Param {
        match self {
            ParamName::Rho => Param::Rho,
            ParamName::Tau2 => Param::Tau2,
            ParamName::Sigma2 => Param::Sigma2,
        }
    }
}

/// Smoothing backend of the additive-functional estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Pathspace,
    Fixedlag,
    Ffbsm,
    Forward,
    Paris,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Pathspace => "pathspace",
            Method::Fixedlag => "fixedlag",
            Method::Ffbsm => "ffbsm",
            Method::Forward => "forward",
            Method::Paris => "paris",
        }
    }

    /// Cost per time step is linear in the number of particles.
    pub fn linear_cost(self) -> bool {
        matches!(self, Method::Pathspace | Method::Fixedlag | Method::Paris)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalName {
    Bootstrap,
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Multinomial,
    Systematic,
}

/// What the `custom` experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Filter,
    Smooth,
    OfflineEm,
    OfflineGradient,
    OnlineEm,
    OnlineGradient,
    Pmmh,
    Pgibbs,
    McmcWithinSmc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Data-generating (or fixed) parameter values.
    pub rho: f64,
    pub tau2: f64,
    pub sigma2: f64,
    pub init: InitKind,
    /// Moments of `X_0` when `init = "fixed"`.
    pub init_mean: f64,
    pub init_var: f64,
    /// Parameters the estimators may move.
    pub free: Vec<ParamName>,
    /// Starting point `(rho, tau2, sigma2)` of the estimators; sampled from
    /// the prior per replicate when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    /// Particle counts.
    pub n: Vec<usize>,
    /// Horizons `T` (observations `y_{0:T}`).
    pub t: Vec<usize>,
    pub methods: Vec<Method>,
    /// Linear-cost methods get `N^2` particles to match the quadratic ones.
    pub match_cost: bool,
    pub lag: usize,
    pub k: usize,
    pub iters: usize,
    pub burn_in: usize,
    pub record_every: usize,
    pub step_scale: f64,
    pub step_exponent: f64,
    pub n_freeze: usize,
    pub proposal: ProposalName,
    pub scheme: SchemeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ess_threshold: Option<f64>,
    pub rw_scale: f64,
    /// Candidate particle counts for likelihood-noise tuning (empty: no tuning).
    pub candidates: Vec<usize>,
    pub tune_replicates: usize,
    pub target_sd: f64,
    pub grid_points: usize,
    pub grid_rounds: usize,
    pub refresh: bool,
    pub mws_n: usize,
    pub pg_n: usize,
    pub pg_iters: usize,
    pub estimator: Estimator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub out: PathBuf,
    pub replicates: usize,
    pub parallelism: usize,
    /// CSV `t,y` (or `t,x,y`) to use instead of simulated data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<PathBuf>,
    pub model: ModelConfig,
    pub prior: PriorConfig,
    pub algorithm: AlgorithmConfig,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub replicates: Option<usize>,
    pub parallelism: Option<usize>,
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl ExperimentConfig {
    /// Desk-scale defaults of each experiment.
    pub fn defaults(id: ExperimentId) -> Self {
        let mut cfg = ExperimentConfig {
            experiment: id,
            seed: 1,
            out: PathBuf::from("results"),
            replicates: 100,
            parallelism: default_parallelism(),
            observations: None,
            model: ModelConfig {
                rho: 0.8,
                tau2: 0.1,
                sigma2: 1.0,
                init: InitKind::Stationary,
                init_mean: 0.0,
                init_var: 1.0,
                free: vec![ParamName::Rho, ParamName::Tau2, ParamName::Sigma2],
                theta0: None,
            },
            prior: PriorConfig { a: 1.0, b: 1.0, c: 1.0, d: 1.0 },
            algorithm: AlgorithmConfig {
                n: vec![50, 100, 200],
                t: vec![5000],
                methods: vec![Method::Pathspace, Method::Forward],
                match_cost: true,
                lag: 20,
                k: 2,
                iters: 25,
                burn_in: 0,
                record_every: 250,
                step_scale: 1.0,
                step_exponent: 0.8,
                n_freeze: 50,
                proposal: ProposalName::Bootstrap,
                scheme: SchemeName::Multinomial,
                ess_threshold: None,
                rw_scale: 0.1,
                candidates: Vec::new(),
                tune_replicates: 20,
                target_sd: 1.3,
                grid_points: 41,
                grid_rounds: 3,
                refresh: true,
                mws_n: 5000,
                pg_n: 50,
                pg_iters: 3000,
                estimator: Estimator::Filter,
            },
        };
        let m = &mut cfg.model;
        let a = &mut cfg.algorithm;
        match id {
            ExperimentId::SmoothingBiasVar => {}
            ExperimentId::OfflineEm | ExperimentId::OnlineEm => {
                m.rho = 0.8;
                m.tau2 = 1.0;
                m.sigma2 = 0.04;
                m.free = vec![ParamName::Rho, ParamName::Tau2];
                m.theta0 = Some([0.1, 0.01, 0.04]);
                a.n = vec![150];
                if id == ExperimentId::OfflineEm {
                    cfg.replicates = 50;
                    a.t = vec![100, 1000, 2500];
                    a.methods = vec![Method::Forward, Method::Pathspace];
                } else {
                    cfg.replicates = 50;
                    a.t = vec![20_000];
                    a.methods = vec![Method::Forward];
                    a.record_every = 1000;
                }
            }
            ExperimentId::Degeneracy => {
                m.rho = 1.0;
                m.tau2 = 1.0;
                m.sigma2 = 1.0;
                m.init = InitKind::Fixed;
                m.free = vec![ParamName::Tau2, ParamName::Sigma2];
                cfg.replicates = 20;
                a.t = vec![20_000];
                a.mws_n = 5000;
                a.record_every = 1000;
            }
            ExperimentId::PosteriorMcmcSmc | ExperimentId::PgibbsCompare => {
                m.rho = 0.5;
                m.tau2 = 0.01;
                m.sigma2 = 1.0;
                m.free = vec![ParamName::Rho, ParamName::Sigma2];
                if id == ExperimentId::PosteriorMcmcSmc {
                    cfg.replicates = 50;
                    a.t = vec![5000];
                    a.mws_n = 10_000;
                    a.record_every = 1000;
                } else {
                    cfg.replicates = 20;
                    a.t = vec![1000];
                    a.mws_n = 75_000;
                    a.pg_n = 50;
                    a.pg_iters = 3000;
                    a.burn_in = 300;
                }
            }
            ExperimentId::Custom => {
                cfg.replicates = 1;
                a.n = vec![500];
                a.t = vec![200];
                a.methods = vec![Method::Forward];
                a.iters = 1000;
                a.record_every = 50;
                a.mws_n = 1000;
                a.pg_n = 100;
                a.pg_iters = 1000;
            }
        }
        cfg
    }

    /// Parses `text` for experiment `id`; returns the resolved config and
    /// the dotted names of the keys that took their defaults.
    pub fn from_toml(text: &str, id: ExperimentId, overrides: &Overrides) -> Result<(Self, Vec<String>), ConfigError> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
        if let Some(v) = user.get("experiment") {
            if v.as_str() != Some(id.name()) {
                return Err(ConfigError::Invalid(format!(
                    "config is for experiment {v} but {} was requested",
                    id.name()
                )));
            }
        }
        let defaults = toml::Table::try_from(Self::defaults(id)).expect("defaults serialise");
        let mut merged = defaults.clone();
        merge(&mut merged, &user);
        let mut defaulted = Vec::new();
        missing_keys(&defaults, Some(&user), "", &mut defaulted);
        let mut cfg: ExperimentConfig = ExperimentConfig::deserialize(toml::Value::Table(merged))
            .map_err(|e| ConfigError::Schema(e.to_string()))?;
        if let Some(s) = overrides.seed {
            cfg.seed = s;
            defaulted.retain(|k| k != "seed");
        }
        if let Some(o) = &overrides.out {
            cfg.out = o.clone();
            defaulted.retain(|k| k != "out");
        }
        if let Some(r) = overrides.replicates {
            cfg.replicates = r;
            defaulted.retain(|k| k != "replicates");
        }
        if let Some(p) = overrides.parallelism {
            cfg.parallelism = p;
            defaulted.retain(|k| k != "parallelism");
        }
        cfg.validate()?;
        Ok((cfg, defaulted))
    }

    pub fn load(path: &Path, id: ExperimentId, overrides: &Overrides) -> Result<(Self, Vec<String>), ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_toml(&text, id, overrides)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let a = &self.algorithm;
        if self.replicates == 0 {
            return bad("replicates must be >= 1".into());
        }
        if self.parallelism == 0 {
            return bad("parallelism must be >= 1".into());
        }
        self.theta().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.initial_law().moments(&self.theta().unwrap()).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.prior_spec()?;
        if let Some(t0) = self.model.theta0 {
            Theta::new(t0[0], t0[1], t0[2]).map_err(|e| ConfigError::Invalid(format!("theta0: {e}")))?;
        }
        if a.n.is_empty() || a.n.contains(&0) {
            return bad("algorithm.n must be a non-empty list of positive counts".into());
        }
        if a.t.is_empty() {
            return bad("algorithm.t must not be empty".into());
        }
        if a.methods.is_empty() {
            return bad("algorithm.methods must not be empty".into());
        }
        if a.record_every == 0 {
            return bad("algorithm.record_every must be >= 1".into());
        }
        if a.iters == 0 {
            return bad("algorithm.iters must be >= 1".into());
        }
        if a.k == 0 {
            return bad("algorithm.k must be >= 1".into());
        }
        if a.mws_n == 0 || a.pg_n == 0 || a.pg_iters == 0 {
            return bad("algorithm.mws_n, pg_n and pg_iters must be >= 1".into());
        }
        let chain = match (self.experiment, a.estimator) {
            (ExperimentId::PgibbsCompare, _) | (ExperimentId::Custom, Estimator::Pgibbs) => Some(a.pg_iters),
            (ExperimentId::Custom, Estimator::Pmmh) => Some(a.iters),
            _ => None,
        };
        if chain.is_some_and(|len| a.burn_in >= len) {
            return bad("algorithm.burn_in must be smaller than the chain length".into());
        }
        if a.grid_points < 3 {
            return bad("algorithm.grid_points must be >= 3".into());
        }
        if !(a.rw_scale > 0.0 && a.rw_scale.is_finite()) {
            return bad("algorithm.rw_scale must be > 0".into());
        }
        if !(a.target_sd > 0.0) || a.tune_replicates < 2 {
            return bad("algorithm.target_sd must be > 0 and tune_replicates >= 2".into());
        }
        if let Some(e) = a.ess_threshold {
            if !(0.0..=1.0).contains(&e) {
                return bad(format!("algorithm.ess_threshold = {e} outside [0, 1]"));
            }
        }
        self.step_size().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let free = self.free_mask();
        let needs = |ok: bool, what: &str| if ok { Ok(()) } else { bad(what.to_string()) };
        match self.experiment {
            ExperimentId::SmoothingBiasVar => needs(a.t.len() == 1, "smoothing_bias_var takes a single horizon"),
            ExperimentId::OfflineEm => {
                needs((1..=2).contains(&free.count()), "offline_em needs one or two free parameters")
            }
            ExperimentId::OnlineEm => {
                needs(a.t.len() == 1, "online_em takes a single horizon")?;
                needs((1..=2).contains(&free.count()), "online_em needs one or two free parameters")?;
                needs(
                    a.methods.iter().all(|m| matches!(m, Method::Forward | Method::Pathspace)),
                    "online_em supports the forward and pathspace methods",
                )
            }
            ExperimentId::Degeneracy => {
                needs(a.t.len() == 1, "degeneracy takes a single horizon")?;
                needs(
                    free.tau2 && (1..=2).contains(&free.count()),
                    "degeneracy needs tau2 free and at most two free parameters",
                )
            }
            ExperimentId::PosteriorMcmcSmc | ExperimentId::PgibbsCompare => {
                needs(a.t.len() == 1, "this experiment takes a single horizon")?;
                needs((1..=2).contains(&free.count()), "this experiment needs one or two free parameters")
            }
            ExperimentId::Custom => needs(a.t.len() == 1, "custom takes a single horizon"),
        }
    }

    pub fn theta(&self) -> sspe::Result<Theta> {
        Ok(Theta::new(self.model.rho, self.model.tau2, self.model.sigma2)?.with_free(self.free_mask()))
    }

    /// Starting point of the estimators, if configured.
    pub fn theta0(&self) -> Option<Theta> {
        self.model.theta0.map(|t| Theta { rho: t[0], tau2: t[1], sigma2: t[2], free: self.free_mask() })
    }

    pub fn free_mask(&self) -> FreeMask {
        let has = |p| self.model.free.contains(&p);
        FreeMask::new(has(ParamName::Rho), has(ParamName::Tau2), has(ParamName::Sigma2))
    }

    pub fn initial_law(&self) -> InitialLaw {
        match self.model.init {
            InitKind::Stationary => InitialLaw::Stationary,
            InitKind::Fixed => InitialLaw::Fixed { mean: self.model.init_mean, var: self.model.init_var },
        }
    }

    pub fn prior_spec(&self) -> Result<PriorSpec, ConfigError> {
        let p = &self.prior;
        PriorSpec::new(p.a, p.b, p.c, p.d).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn proposal(&self) -> ProposalKind {
        match self.algorithm.proposal {
            ProposalName::Bootstrap => ProposalKind::Bootstrap,
            ProposalName::Optimal => ProposalKind::Optimal,
        }
    }

    pub fn filter_options(&self) -> FilterOptions {
        FilterOptions {
            scheme: match self.algorithm.scheme {
                SchemeName::Multinomial => ResamplingScheme::Multinomial,
                SchemeName::Systematic => ResamplingScheme::Systematic,
            },
            ess_threshold: self.algorithm.ess_threshold,
            store_trajectories: false,
        }
    }

    pub fn backend(&self, m: Method) -> Backend {
        match m {
            Method::Exact => Backend::Exact,
            Method::Pathspace => Backend::PathSpace,
            Method::Fixedlag => Backend::FixedLag(self.algorithm.lag),
            Method::Ffbsm => Backend::Ffbsm,
            Method::Forward => Backend::Forward,
            Method::Paris => Backend::Paris(self.algorithm.k),
        }
    }

    /// Particle count used by method `m` at base count `n`.
    pub fn particles_for(&self, m: Method, n: usize) -> usize {
        if self.algorithm.match_cost && m.linear_cost() {
            n * n
        } else {
            n
        }
    }

    pub fn step_size(&self) -> sspe::Result<sspe::ml::StepSize> {
        sspe::ml::StepSize::power(self.algorithm.step_scale, self.algorithm.step_exponent)
    }

    /// Recording times `record_every, 2 record_every, ...` up to and including `horizon`.
    pub fn record_times(&self, horizon: usize) -> Vec<usize> {
        let step = self.algorithm.record_every;
        let mut v: Vec<usize> = (1..).map(|k| k * step).take_while(|&n| n <= horizon).collect();
        if v.last() != Some(&horizon) && horizon > 0 {
            v.push(horizon);
        }
        v
    }
}

fn merge(base: &mut toml::Table, user: &toml::Table) {
    for (k, v) in user {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

/// Dotted paths of the leaves of `defaults` absent from `user`.
fn missing_keys(defaults: &toml::Table, user: Option<&toml::Table>, prefix: &str, out: &mut Vec<String>) {
    for (k, v) in defaults {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        let u = user.and_then(|t| t.get(k));
        match v {
            toml::Value::Table(d) => missing_keys(d, u.and_then(|u| u.as_table()), &path, out),
            _ if u.is_none() => out.push(path),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_takes_defaults() {
        let (cfg, defaulted) = ExperimentConfig::from_toml("", ExperimentId::OnlineEm, &Overrides::default()).unwrap();
        assert_eq!(cfg, {
            let mut d = ExperimentConfig::defaults(ExperimentId::OnlineEm);
            d.parallelism = cfg.parallelism;
            d
        });
        assert!(defaulted.contains(&"algorithm.n_freeze".to_string()));
        assert!(defaulted.contains(&"model.rho".to_string()));
    }

    #[test]
    fn user_values_and_overrides_win() {
        let text = "replicates = 3\n[algorithm]\nn = [10]\n[model]\nrho = 0.5\n";
        let o = Overrides { seed: Some(9), replicates: Some(4), ..Default::default() };
        let (cfg, defaulted) = ExperimentConfig::from_toml(text, ExperimentId::SmoothingBiasVar, &o).unwrap();
        assert_eq!(cfg.replicates, 4);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.algorithm.n, vec![10]);
        assert_eq!(cfg.model.rho, 0.5);
        assert!(!defaulted.iter().any(|k| k == "algorithm.n" || k == "seed" || k == "model.rho"));
        assert!(defaulted.iter().any(|k| k == "algorithm.t"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in ["bogus = 1", "[algorithm]\nbogus = 1", "[model]\nmu = 0.1"] {
            let e = ExperimentConfig::from_toml(text, ExperimentId::Custom, &Overrides::default()).unwrap_err();
            assert!(matches!(e, ConfigError::Schema(_)), "{text}: {e}");
            assert!(e.to_string().contains("unknown field"), "{e}");
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "replicates = 0",
            "[model]\nrho = 2.0",
            "[algorithm]\nn = []",
            "experiment = \"offline_em\"",
            "[prior]\na = -1.0",
        ] {
            assert!(ExperimentConfig::from_toml(text, ExperimentId::Custom, &Overrides::default()).is_err(), "{text}");
        }
    }

    #[test]
    fn record_times_end_at_horizon() {
        let cfg = ExperimentConfig::defaults(ExperimentId::Custom);
        assert_eq!(cfg.record_times(120), vec![50, 100, 120]);
        assert_eq!(cfg.record_times(100), vec![50, 100]);
    }
}
