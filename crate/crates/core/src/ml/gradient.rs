//! Off-line gradient ascent on the log-likelihood with the score from
//! Fisher's identity, in unconstrained coordinates.

use crate::error::{Error, Result};
use crate::kalman::kalman_loglik;
use crate::ml::backend::{smoothed_additive, Backend, ParticleConfig};
use crate::ml::em::EstimateTrace;
use crate::ml::reparam::{from_unconstrained, to_unconstrained, to_unconstrained_gradient};
use crate::ml::schedule::StepSize;
use crate::model::{check_observations, InitialLaw, ProposalKind, Theta};
use crate::rng::{streams, substream};
use crate::smooth::QuadraticFunctional;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientStep {
    /// Fixed step; with `halving`, the step is halved until the exact
    /// log-likelihood does not decrease (the Kalman oracle is available for
    /// the linear-Gaussian model).
    Fixed { step: f64, halving: bool },
    /// Decreasing step `gamma_k` at iteration `k >= 1`.
    Schedule(StepSize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientOptions {
    pub iters: usize,
    pub backend: Backend,
    pub particles: ParticleConfig,
    pub init: InitialLaw,
    pub step: GradientStep,
}

impl Default for GradientOptions {
    fn default() -> Self {
        GradientOptions {
            iters: 50,
            backend: Backend::Ffbsm,
            particles: ParticleConfig::new(500, ProposalKind::Bootstrap),
            init: InitialLaw::Stationary,
            step: GradientStep::Fixed { step: 1.0, halving: true },
        }
    }
}

/// Gradient ascent; the score is divided by the number of observations so
/// that step sizes do not depend on the data length.
pub fn offline_gradient(y: &[f64], theta0: &Theta, opts: &GradientOptions, seed: u64) -> Result<EstimateTrace> {
    check_observations(y)?;
    theta0.validate()?;
    let n_obs = y.len() as f64;
    let mut rng = substream(seed, streams::ESTIMATOR);
    let mut theta = *theta0;
    let mut ll = kalman_loglik(&theta, opts.init, y)?;
    let mut trace = EstimateTrace { thetas: vec![theta], exact_loglik: vec![ll], boundary_hits: 0 };
    let mut fixed_step = match opts.step {
        GradientStep::Fixed { step, .. } => step,
        GradientStep::Schedule(s) => {
            s.validate()?;
            0.0
        }
    };
    for k in 0..opts.iters {
        let s = QuadraticFunctional::score(&theta, opts.init);
        let g = smoothed_additive(opts.backend, &theta, opts.init, y, &s, &opts.particles, &mut rng)
            .map_err(|e| e.at_iteration(k))?;
        let g = [g[0], g[1], g[2]];
        let gu = to_unconstrained_gradient(&theta, &g);
        if gu.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient { iteration: k });
        }
        let u = to_unconstrained(&theta);
        let propose = |step: f64| {
            let mut v = u;
            for i in 0..3 {
                v[i] += step * gu[i] / n_obs;
            }
            from_unconstrained(&v, &theta)
        };
        let next = match opts.step {
            GradientStep::Schedule(sched) => propose(sched.gamma(k + 1)),
            GradientStep::Fixed { halving: false, .. } => propose(fixed_step),
            GradientStep::Fixed { halving: true, .. } => {
                let mut accepted = theta;
                for _ in 0..60 {
                    let cand = propose(fixed_step);
                    match kalman_loglik(&cand, opts.init, y) {
                        Ok(v) if v >= ll => {
                            accepted = cand;
                            break;
                        }
                        _ => fixed_step *= 0.5,
                    }
                }
                accepted
            }
        };
        theta = next;
        ll = kalman_loglik(&theta, opts.init, y)?;
        trace.thetas.push(theta);
        trace.exact_loglik.push(ll);
    }
    Ok(trace)
}
