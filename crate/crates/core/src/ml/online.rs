//! On-line estimators that update `theta` after every observation.
//!
//! Both advance the particle filter with `theta_n` at time `n` and keep only
//! per-particle value functions (no path storage).
//!
//! * Recursive maximum likelihood:
//!   `theta_{n+1} = theta_n + gamma_{n+1} (S_n - S_{n-1})`, where `S_n` is the
//!   particle estimate of the time-varying score, applied in unconstrained
//!   coordinates.
//! * On-line EM: `V_n = sum_i B(i) [(1 - gamma_{n+1}) V_{n-1} + gamma_{n+1} s_n]`,
//!   `S_n = sum_j W_n^j V_n(X_n^j)` and `theta_{n+1} = Lambda(S_n)` once
//!   `n >= n_freeze`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::filter::ParticleFilter;
use crate::ml::backend::ParticleConfig;
use crate::ml::lambda::lambda_map_averaged;
use crate::ml::reparam::{from_unconstrained, to_unconstrained, to_unconstrained_gradient};
use crate::ml::schedule::StepSize;
use crate::model::{check_observations, InitialLaw, LinearGaussian, Param, ProposalKind, Theta};
use crate::rng::{streams, substream};
use crate::smooth::{ForwardSmoother, OnlineSmoother, PathSpaceSmoother, QuadraticFunctional, Weighting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OnlineSmoothing {
    #[default]
    Forward,
    PathSpace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineOptions {
    pub schedule: StepSize,
    pub particles: ParticleConfig,
    pub init: InitialLaw,
    pub smoothing: OnlineSmoothing,
    /// Updates of `theta` start at time `n_freeze`.
    pub n_freeze: usize,
    /// Keep the per-step statistic increments (memory `O(T)`).
    pub record_increments: bool,
}

impl Default for OnlineOptions {
    fn default() -> Self {
        OnlineOptions {
            schedule: StepSize::Power { scale: 1.0, exponent: 0.8 },
            particles: ParticleConfig::new(150, ProposalKind::Bootstrap),
            init: InitialLaw::Stationary,
            smoothing: OnlineSmoothing::Forward,
            n_freeze: 50,
            record_increments: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineTrace {
    /// `thetas[n]` is the parameter used at time `n`; the last entry is the
    /// estimate after the final observation.
    pub thetas: Vec<Theta>,
    /// Per-step statistic increments when requested (score increments for
    /// the gradient method, `S_n` for EM).
    pub increments: Vec<Vec<f64>>,
}

impl OnlineTrace {
    pub fn last(&self) -> &Theta {
        self.thetas.last().unwrap()
    }
}

enum Smoother {
    Forward(ForwardSmoother),
    PathSpace(PathSpaceSmoother),
}

impl Smoother {
    fn new(kind: OnlineSmoothing, dim: usize) -> Self {
        match kind {
            OnlineSmoothing::Forward => Smoother::Forward(ForwardSmoother::new(dim)),
            OnlineSmoothing::PathSpace => Smoother::PathSpace(PathSpaceSmoother::new(dim)),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn update<R: Rng + ?Sized>(
        &mut self,
        model: &LinearGaussian,
        s: &QuadraticFunctional,
        pf: &ParticleFilter,
        first: bool,
        y: f64,
        w: Weighting,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let prev = if first { None } else { pf.previous() };
        let cur = pf.current().unwrap();
        match self {
            Smoother::Forward(sm) => {
                sm.update(model, s, prev, cur, y, w, rng)?;
                Ok(sm.estimate(cur))
            }
            Smoother::PathSpace(sm) => {
                sm.update(model, s, prev, cur, y, w, rng)?;
                Ok(sm.estimate(cur))
            }
        }
    }
}

fn validate(y: &[f64], theta0: &Theta, opts: &OnlineOptions) -> Result<()> {
    check_observations(y)?;
    theta0.validate()?;
    opts.schedule.validate()?;
    if opts.particles.n == 0 {
        return Err(Error::InvalidParameter("number of particles must be >= 1".into()));
    }
    Ok(())
}

/// Recursive maximum likelihood.
pub fn online_gradient(y: &[f64], theta0: &Theta, opts: &OnlineOptions, seed: u64) -> Result<OnlineTrace> {
    validate(y, theta0, opts)?;
    let mut rng = substream(seed, streams::ESTIMATOR);
    let mut pf = ParticleFilter::new(opts.particles.n, opts.particles.filter)?;
    let mut sm = Smoother::new(opts.smoothing, 3);
    let mut theta = *theta0;
    let mut thetas = Vec::with_capacity(y.len() + 1);
    let mut increments = Vec::new();
    let mut last = [0.0; 3];
    for (n, &yn) in y.iter().enumerate() {
        thetas.push(theta);
        let model = LinearGaussian::new(theta, opts.init, opts.particles.proposal)?;
        pf.step(&model, yn, &mut rng)?;
        let s = QuadraticFunctional::score(&theta, opts.init);
        let est = sm.update(&model, &s, &pf, n == 0, yn, Weighting::PLAIN, &mut rng)?;
        let inc = [est[0] - last[0], est[1] - last[1], est[2] - last[2]];
        last = [est[0], est[1], est[2]];
        if opts.record_increments {
            increments.push(inc.to_vec());
        }
        if n >= opts.n_freeze {
            let g = to_unconstrained_gradient(&theta, &inc);
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteGradient { iteration: n });
            }
            let gamma = opts.schedule.gamma(n + 1);
            let mut u = to_unconstrained(&theta);
            for k in 0..3 {
                u[k] += gamma * g[k];
            }
            let mut next = project(from_unconstrained(&u, &theta), opts.init);
            // The coordinate round trip is not bit-exact; untouched components keep their bits.
            for p in Param::ALL {
                if gamma * g[p.index()] == 0.0 {
                    next.set(p, theta.get(p));
                }
            }
            theta = next;
        }
    }
    thetas.push(theta);
    Ok(OnlineTrace { thetas, increments })
}

fn project(mut t: Theta, init: InitialLaw) -> Theta {
    let edge = if init.depends_on_theta() { 1.0 - 1e-9 } else { 1.0 };
    t.rho = t.rho.clamp(-edge, edge);
    t.tau2 = t.tau2.clamp(1e-10, 1e10);
    t.sigma2 = t.sigma2.clamp(1e-10, 1e10);
    t
}

/// On-line EM.
pub fn online_em(y: &[f64], theta0: &Theta, opts: &OnlineOptions, seed: u64) -> Result<OnlineTrace> {
    validate(y, theta0, opts)?;
    if opts.n_freeze == 0 {
        return Err(Error::InvalidParameter("n_freeze must be >= 1".into()));
    }
    let mut rng = substream(seed, streams::ESTIMATOR);
    let mut pf = ParticleFilter::new(opts.particles.n, opts.particles.filter)?;
    let s = QuadraticFunctional::em_statistic();
    let mut sm = Smoother::new(opts.smoothing, s.trans.len());
    let mut theta = *theta0;
    let mut thetas = Vec::with_capacity(y.len() + 1);
    let mut increments = Vec::new();
    for (n, &yn) in y.iter().enumerate() {
        thetas.push(theta);
        let model = LinearGaussian::new(theta, opts.init, opts.particles.proposal)?;
        pf.step(&model, yn, &mut rng)?;
        let w = Weighting::step_size(opts.schedule.gamma(n + 1));
        let stat = sm.update(&model, &s, &pf, n == 0, yn, w, &mut rng)?;
        if n >= opts.n_freeze {
            let m = lambda_map_averaged(&stat, &theta).map_err(|e| e.at_iteration(n))?;
            theta = project(m.to_theta(&theta), opts.init);
        }
        if opts.record_increments {
            increments.push(stat);
        }
    }
    thetas.push(theta);
    Ok(OnlineTrace { thetas, increments })
}
