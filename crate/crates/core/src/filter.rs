//! Auxiliary particle filter.
//!
//! Each step resamples the previous population with auxiliary weights
//! `W_{n-1}^i q(y_n | X_{n-1}^i)`, moves every particle with the proposal
//! `q(x_n | y_n, x_{n-1})` and reweights with
//!
//! ```text
//! w_n = g(y_n | x_n) f(x_n | x_{n-1}) / (q(x_n | y_n, x_{n-1}) q(y_n | x_{n-1}))
//! ```
//!
//! The likelihood increment is
//! `log[(1/N) sum_i w_n^i] + log[sum_i W_{n-1}^i q(y_n | X_{n-1}^i)]`.
//! With `q(y | x) = 1` this is SISR, and with the transition as proposal it is
//! the bootstrap filter.
//!
//! Resampling is performed lazily at the start of the next step, so the last
//! time step needs no look-ahead observation.

use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::model::{check_observations, StateSpaceModel};
use crate::particle::{ess, log_sum_exp, normalize_into, resample_into, Categorical, ParticleSystem, ResamplingScheme};

/// Run-time options of the particle filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterOptions {
    pub scheme: ResamplingScheme,
    /// Resample only when the auxiliary ESS drops below `threshold * N`.
    /// `None` resamples at every step.
    pub ess_threshold: Option<f64>,
    /// Reconstruct the full ancestral path of every final particle.
    pub store_trajectories: bool,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions { scheme: ResamplingScheme::Multinomial, ess_threshold: None, store_trajectories: false }
    }
}

impl FilterOptions {
    pub fn with_trajectories(mut self) -> Self {
        self.store_trajectories = true;
        self
    }

    /// Enables the ESS trigger at the conventional `N / 2`.
    pub fn with_ess_trigger(mut self) -> Self {
        self.ess_threshold = Some(0.5);
        self
    }
}

/// Echo of the configuration that produced a [`FilterOutput`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub n_particles: usize,
    pub proposal: &'static str,
    pub scheme: ResamplingScheme,
    pub ess_threshold: Option<f64>,
}

/// Result of a full filtering sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    pub systems: Vec<ParticleSystem>,
    pub loglik_increments: Vec<f64>,
    /// `trajectories[i]` is the ancestral path `x_{0:T}` of final particle `i`.
    pub trajectories: Option<Vec<Vec<f64>>>,
    pub observations: Vec<f64>,
    pub config: FilterConfig,
}

impl FilterOutput {
    /// `log p_hat(y_{0:T})`.
    pub fn loglik(&self) -> f64 {
        self.loglik_increments.iter().sum()
    }

    pub fn horizon(&self) -> usize {
        self.systems.len() - 1
    }

    pub fn n_particles(&self) -> usize {
        self.config.n_particles
    }

    /// Ancestral path of particle `i` of the final system.
    pub fn trace_path(&self, i: usize) -> Vec<f64> {
        let t = self.horizon();
        let mut path = vec![0.0; t + 1];
        let mut idx = i;
        for n in (0..=t).rev() {
            let sys = &self.systems[n];
            path[n] = sys.positions[idx];
            idx = sys.ancestors[idx];
        }
        path
    }

    /// Path of a final particle drawn from the final weights.
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let last = self.systems.last().unwrap();
        let i = Categorical::new(&last.norm_weights).sample(rng);
        self.trace_path(i)
    }

    /// CSV `t,loglik_increment,ess,filtered_mean,filtered_var`.
    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,loglik_increment,ess,filtered_mean,filtered_var")?;
        for (t, (sys, inc)) in self.systems.iter().zip(&self.loglik_increments).enumerate() {
            writeln!(
                w,
                "{t},{},{},{},{}",
                fmt_f64(*inc),
                fmt_f64(sys.ess()),
                fmt_f64(sys.mean()),
                fmt_f64(sys.variance())
            )?;
        }
        Ok(())
    }
}

/// Reusable buffers for [`advance`].
#[derive(Debug, Default, Clone)]
pub(crate) struct Scratch {
    aux: Vec<f64>,
    aux_w: Vec<f64>,
    log_prior: Vec<f64>,
    draws: Vec<usize>,
}

/// One filter step written into `out`; returns the log-likelihood increment.
///
/// `prev = None` initialises at time 0. `frozen` pins slot 0 to a given
/// state whose ancestor is slot 0 (conditional SMC).
#[allow(clippy::too_many_arguments)]
pub(crate) fn advance<M: StateSpaceModel + ?Sized, R: Rng + ?Sized>(
    prev: Option<&ParticleSystem>,
    model: &M,
    y: f64,
    n: usize,
    options: &FilterOptions,
    frozen: Option<f64>,
    rng: &mut R,
    out: &mut ParticleSystem,
    scratch: &mut Scratch,
) -> Result<f64> {
    if !y.is_finite() {
        let index = prev.map_or(0, |p| p.time_index + 1);
        return Err(Error::NonFiniteObservation { index });
    }
    out.positions.clear();
    out.log_weights.clear();
    out.ancestors.clear();
    match prev {
        None => {
            out.time_index = 0;
            out.resampled = false;
            for i in 0..n {
                let x = match (i, frozen) {
                    (0, Some(r)) => r,
                    _ => model.init_proposal_sample(y, rng),
                };
                out.positions.push(x);
                out.log_weights.push(model.initial_logweight(y, x));
                out.ancestors.push(i);
            }
            normalize_into(&out.log_weights, &mut out.norm_weights, 0)
        }
        Some(prev) => {
            let time = prev.time_index + 1;
            out.time_index = time;
            let np = prev.len();
            // ln W_{n-1} + ln q(y_n | x_{n-1})
            let lse_prev = log_sum_exp(&prev.log_weights);
            scratch.aux.clear();
            for i in 0..np {
                let lw = prev.log_weights[i] - lse_prev;
                scratch.aux.push(lw + model.predictive_logweight(y, prev.positions[i]));
            }
            let aux_log_mean = normalize_into(&scratch.aux, &mut scratch.aux_w, time)?;
            let aux_lse = aux_log_mean + (np as f64).ln();

            let do_resample = match options.ess_threshold {
                None => true,
                Some(f) => ess(&scratch.aux_w) < f * n as f64,
            };
            out.resampled = do_resample;
            scratch.log_prior.clear();
            if do_resample {
                match frozen {
                    Some(_) => {
                        out.ancestors.push(0);
                        resample_into(&scratch.aux_w, n - 1, options.scheme, rng, &mut scratch.draws);
                        out.ancestors.extend_from_slice(&scratch.draws);
                    }
                    None => {
                        resample_into(&scratch.aux_w, n, options.scheme, rng, &mut scratch.draws);
                        out.ancestors.extend_from_slice(&scratch.draws);
                    }
                }
                scratch.log_prior.resize(n, 0.0);
            } else {
                debug_assert_eq!(n, np);
                let ln_n = (n as f64).ln();
                out.ancestors.extend(0..n);
                scratch.log_prior.extend(scratch.aux_w.iter().map(|w| w.ln() + ln_n));
            }
            for i in 0..n {
                let xp = prev.positions[out.ancestors[i]];
                let x = match (i, frozen) {
                    (0, Some(r)) => r,
                    _ => model.proposal_sample(y, xp, rng),
                };
                out.positions.push(x);
                out.log_weights.push(scratch.log_prior[i] + model.incremental_logweight(y, xp, x));
            }
            let log_mean = normalize_into(&out.log_weights, &mut out.norm_weights, time)?;
            Ok(log_mean + aux_lse)
        }
    }
}

/// Streaming particle filter. The model may change between steps (on-line
/// parameter estimation advances the filter with `theta_n` at time `n`).
#[derive(Debug, Clone)]
pub struct ParticleFilter {
    n: usize,
    options: FilterOptions,
    prev: Option<ParticleSystem>,
    cur: Option<ParticleSystem>,
    loglik: f64,
    scratch: Scratch,
}

impl ParticleFilter {
    pub fn new(n: usize, options: FilterOptions) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("number of particles must be >= 1".into()));
        }
        if let Some(f) = options.ess_threshold {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidParameter(format!("ESS threshold {f} outside [0, 1]")));
            }
        }
        Ok(ParticleFilter { n, options, prev: None, cur: None, loglik: 0.0, scratch: Scratch::default() })
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn options(&self) -> &FilterOptions {
        &self.options
    }

    /// Assimilates `y`; returns `log p_hat(y_n | y_{0:n-1})`.
    pub fn step<M: StateSpaceModel + ?Sized, R: Rng + ?Sized>(
        &mut self,
        model: &M,
        y: f64,
        rng: &mut R,
    ) -> Result<f64> {
        self.step_frozen(model, y, None, rng)
    }

    pub(crate) fn step_frozen<M: StateSpaceModel + ?Sized, R: Rng + ?Sized>(
        &mut self,
        model: &M,
        y: f64,
        frozen: Option<f64>,
        rng: &mut R,
    ) -> Result<f64> {
        let mut next = self.prev.take().unwrap_or_else(|| ParticleSystem {
            time_index: 0,
            positions: Vec::with_capacity(self.n),
            log_weights: Vec::with_capacity(self.n),
            norm_weights: Vec::with_capacity(self.n),
            ancestors: Vec::with_capacity(self.n),
            resampled: false,
        });
        let inc =
            advance(self.cur.as_ref(), model, y, self.n, &self.options, frozen, rng, &mut next, &mut self.scratch)?;
        self.prev = self.cur.take();
        self.cur = Some(next);
        self.loglik += inc;
        Ok(inc)
    }

    /// Current system (after at least one step).
    pub fn current(&self) -> Option<&ParticleSystem> {
        self.cur.as_ref()
    }

    /// System one step before the current one.
    pub fn previous(&self) -> Option<&ParticleSystem> {
        self.prev.as_ref()
    }

    /// `log p_hat(y_{0:n})` accumulated so far.
    pub fn loglik(&self) -> f64 {
        self.loglik
    }
}

/// Stand-alone single step: `prev = None` initialises at time 0.
pub fn filter_step<M: StateSpaceModel + ?Sized, R: Rng + ?Sized>(
    prev: Option<&ParticleSystem>,
    model: &M,
    y: f64,
    n: usize,
    options: &FilterOptions,
    rng: &mut R,
) -> Result<(ParticleSystem, f64)> {
    let mut out = ParticleSystem {
        time_index: 0,
        positions: Vec::new(),
        log_weights: Vec::new(),
        norm_weights: Vec::new(),
        ancestors: Vec::new(),
        resampled: false,
    };
    let inc = advance(prev, model, y, n, options, None, rng, &mut out, &mut Scratch::default())?;
    Ok((out, inc))
}

/// Full sweep over `y`, keeping every particle system.
pub fn run_filter<M: StateSpaceModel + ?Sized, R: Rng + ?Sized>(
    model: &M,
    y: &[f64],
    n: usize,
    options: &FilterOptions,
    rng: &mut R,
) -> Result<FilterOutput> {
    run_filter_frozen(model, y, n, options, None, rng)
}

pub(crate) fn run_filter_frozen<M: StateSpaceModel + ?Sized, R: Rng + ?Sized>(
    model: &M,
    y: &[f64],
    n: usize,
    options: &FilterOptions,
    reference: Option<&[f64]>,
    rng: &mut R,
) -> Result<FilterOutput> {
    check_observations(y)?;
    let mut pf = ParticleFilter::new(n, *options)?;
    let mut systems = Vec::with_capacity(y.len());
    let mut incs = Vec::with_capacity(y.len());
    for (t, &yt) in y.iter().enumerate() {
        let frozen = reference.map(|r| r[t]);
        incs.push(pf.step_frozen(model, yt, frozen, rng)?);
        systems.push(pf.current().unwrap().clone());
    }
    let mut out = FilterOutput {
        systems,
        loglik_increments: incs,
        trajectories: None,
        observations: y.to_vec(),
        config: FilterConfig {
            n_particles: n,
            proposal: model.proposal_name(),
            scheme: options.scheme,
            ess_threshold: options.ess_threshold,
        },
    };
    if options.store_trajectories {
        out.trajectories = Some((0..n).map(|i| out.trace_path(i)).collect());
    }
    Ok(out)
}
