//! Off-line EM: `theta_{k+1} = Lambda(S_hat_T(theta_k) / T)`.

use crate::error::{Error, Result};
use crate::kalman::kalman_loglik;
use crate::ml::backend::{smoothed_additive, Backend, ParticleConfig};
use crate::ml::lambda::{lambda_map, InitialTerm};
use crate::model::{check_observations, InitialLaw, ProposalKind, Theta};
use crate::rng::{streams, substream};
use crate::smooth::QuadraticFunctional;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmOptions {
    pub iters: usize,
    pub backend: Backend,
    pub particles: ParticleConfig,
    pub init: InitialLaw,
}

impl Default for EmOptions {
    fn default() -> Self {
        EmOptions {
            iters: 25,
            backend: Backend::Forward,
            particles: ParticleConfig::new(150, ProposalKind::Bootstrap),
            init: InitialLaw::Stationary,
        }
    }
}

/// Parameter iterates with the exact log-likelihood at each of them.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateTrace {
    /// `thetas[0]` is the starting point.
    pub thetas: Vec<Theta>,
    pub exact_loglik: Vec<f64>,
    /// M-steps whose raw maximiser left the parameter set and was projected.
    pub boundary_hits: usize,
}

impl EstimateTrace {
    pub fn last(&self) -> &Theta {
        self.thetas.last().unwrap()
    }
}

pub fn offline_em(y: &[f64], theta0: &Theta, opts: &EmOptions, seed: u64) -> Result<EstimateTrace> {
    check_observations(y)?;
    theta0.validate()?;
    if opts.iters == 0 {
        return Err(Error::InvalidParameter("EM needs at least one iteration".into()));
    }
    let horizon = y.len() - 1;
    if horizon == 0 {
        return Err(Error::InvalidParameter("EM needs at least two observations".into()));
    }
    let mut rng = substream(seed, streams::ESTIMATOR);
    let s = QuadraticFunctional::em_statistic();
    let mut theta = *theta0;
    let mut trace = EstimateTrace {
        thetas: vec![theta],
        exact_loglik: vec![kalman_loglik(&theta, opts.init, y)?],
        boundary_hits: 0,
    };
    for k in 0..opts.iters {
        let stats = smoothed_additive(opts.backend, &theta, opts.init, y, &s, &opts.particles, &mut rng)
            .map_err(|e| e.at_iteration(k))?;
        let z: Vec<f64> = stats.iter().map(|v| v / horizon as f64).collect();
        let m = lambda_map(&z, horizon, &theta, InitialTerm::from_law(opts.init)).map_err(|e| e.at_iteration(k))?;
        if !m.boundary.is_empty() {
            trace.boundary_hits += 1;
        }
        theta = m.to_theta(&theta);
        trace.thetas.push(theta);
        trace.exact_loglik.push(kalman_loglik(&theta, opts.init, y)?);
    }
    Ok(trace)
}
