//! Smoothing backends used by the estimators.

use rand::Rng;

use crate::error::{Error, Result};
use crate::filter::{run_filter, FilterOptions, ParticleFilter};
use crate::kalman::{exact_additive, exact_additive_trace};
use crate::model::{check_observations, InitialLaw, LinearGaussian, ProposalKind, Theta};
use crate::smooth::{
    ffbsm_additive, AdditiveFunctional, FixedLagSmoother, ForwardSmoother, OnlineSmoother, ParisSmoother,
    PathSpaceSmoother, Weighting,
};

/// Estimator of `S_T` for an additive functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Kalman smoother (quadratic functionals only).
    Exact,
    PathSpace,
    FixedLag(usize),
    Ffbsm,
    Forward,
    /// PaRIS with `K` backward draws per particle.
    Paris(usize),
}

impl Backend {
    pub fn name(&self) -> String {
        match self {
            Backend::Exact => "exact".into(),
            Backend::PathSpace => "pathspace".into(),
            Backend::FixedLag(l) => format!("fixedlag{l}"),
            Backend::Ffbsm => "ffbsm".into(),
            Backend::Forward => "forward".into(),
            Backend::Paris(k) => format!("paris{k}"),
        }
    }
}

/// Particle filter settings shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleConfig {
    pub n: usize,
    pub proposal: ProposalKind,
    pub filter: FilterOptions,
}

impl ParticleConfig {
    pub fn new(n: usize, proposal: ProposalKind) -> Self {
        ParticleConfig { n, proposal, filter: FilterOptions::default() }
    }
}

/// `S_hat_n` at each time in `times` (ascending) for data `y` at fixed `theta`.
#[allow(clippy::too_many_arguments)]
pub fn additive_trace<S, R>(
    backend: Backend,
    theta: &Theta,
    init: InitialLaw,
    y: &[f64],
    s: &S,
    particles: &ParticleConfig,
    times: &[usize],
    rng: &mut R,
) -> Result<Vec<Vec<f64>>>
where
    S: AdditiveFunctional + ?Sized,
    R: Rng + ?Sized,
{
    check_observations(y)?;
    if times.windows(2).any(|w| w[0] >= w[1]) || times.last().is_some_and(|&t| t >= y.len()) {
        return Err(Error::InvalidParameter("record times must be increasing and within the horizon".into()));
    }
    if backend == Backend::Exact {
        return exact_additive_trace(theta, init, y, s, times);
    }
    let model = LinearGaussian::new(*theta, init, particles.proposal)?;
    let mut out = Vec::with_capacity(times.len());
    let mut next = times.iter().peekable();
    match backend {
        Backend::Exact => unreachable!(),
        Backend::Ffbsm => {
            let fo = run_filter(&model, y, particles.n, &particles.filter, rng)?;
            for &t in times {
                let mut sub = fo.clone();
                sub.systems.truncate(t + 1);
                sub.loglik_increments.truncate(t + 1);
                sub.observations.truncate(t + 1);
                out.push(ffbsm_additive(&sub, &model, s)?);
            }
        }
        Backend::FixedLag(lag) => {
            let mut pf = ParticleFilter::new(particles.n, particles.filter)?;
            let mut sm = FixedLagSmoother::new(s.dim(), lag);
            for (t, &yt) in y.iter().enumerate() {
                if next.peek().is_none() {
                    break;
                }
                pf.step(&model, yt, rng)?;
                sm.update(s, pf.current().unwrap(), yt)?;
                if next.peek() == Some(&&t) {
                    next.next();
                    out.push(sm.estimate().to_vec());
                }
            }
        }
        Backend::PathSpace => {
            run_online(&model, y, s, particles, PathSpaceSmoother::new(s.dim()), times, &mut out, rng)?
        }
        Backend::Forward => run_online(&model, y, s, particles, ForwardSmoother::new(s.dim()), times, &mut out, rng)?,
        Backend::Paris(k) => {
            run_online(&model, y, s, particles, ParisSmoother::new(s.dim(), k)?, times, &mut out, rng)?
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn run_online<S, O, R>(
    model: &LinearGaussian,
    y: &[f64],
    s: &S,
    particles: &ParticleConfig,
    mut sm: O,
    times: &[usize],
    out: &mut Vec<Vec<f64>>,
    rng: &mut R,
) -> Result<()>
where
    S: AdditiveFunctional + ?Sized,
    O: OnlineSmoother,
    R: Rng + ?Sized,
{
    let mut pf = ParticleFilter::new(particles.n, particles.filter)?;
    let mut next = times.iter().peekable();
    for (t, &yt) in y.iter().enumerate() {
        if next.peek().is_none() {
            break;
        }
        pf.step(model, yt, rng)?;
        sm.update(model, s, pf.previous().filter(|_| t > 0), pf.current().unwrap(), yt, Weighting::PLAIN, rng)?;
        if next.peek() == Some(&&t) {
            next.next();
            out.push(sm.estimate(pf.current().unwrap()));
        }
    }
    Ok(())
}

/// `S_hat_T` over the whole data set.
pub fn smoothed_additive<S, R>(
    backend: Backend,
    theta: &Theta,
    init: InitialLaw,
    y: &[f64],
    s: &S,
    particles: &ParticleConfig,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    S: AdditiveFunctional + ?Sized,
    R: Rng + ?Sized,
{
    check_observations(y)?;
    if backend == Backend::Exact {
        return exact_additive(theta, init, y, s);
    }
    let t = y.len() - 1;
    Ok(additive_trace(backend, theta, init, y, s, particles, &[t], rng)?.pop().unwrap())
}
