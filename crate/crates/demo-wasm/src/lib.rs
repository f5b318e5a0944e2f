//! Browser demo: three small studies on the AR(1)-plus-noise model, each
//! returning flat arrays for plotting.

use sspe::bayes::PriorSpec;
use sspe::kalman::exact_additive_trace;
use sspe::kalman::grid::{grid_posterior, GridAxis};
use sspe::ml::{additive_trace, Backend, ParticleConfig};
use sspe::model::{lg_densities, simulate_lgssm, FreeMask, InitialLaw, Param, ProposalKind, Theta};
use sspe::prelude::{kalman_filter, run_filter, FilterOptions, QuadraticFunctional};
use sspe::rng::{replicate_seed, streams, substream};
use sspe::stats::{mean, variance};
use wasm_bindgen::prelude::*;

const INIT: InitialLaw = InitialLaw::Stationary;

fn js(e: sspe::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Particle filter against the Kalman filter on one simulated data set.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct FilterComparison {
    pub states: Vec<f64>,
    pub observations: Vec<f64>,
    pub kalman_mean: Vec<f64>,
    pub kalman_sd: Vec<f64>,
    pub particle_mean: Vec<f64>,
    pub particle_sd: Vec<f64>,
    pub ess: Vec<f64>,
    pub kalman_loglik: f64,
    pub particle_loglik: f64,
}

pub fn filter_comparison(
    rho: f64,
    tau2: f64,
    sigma2: f64,
    horizon: usize,
    particles: usize,
    seed: u64,
) -> sspe::Result<FilterComparison> {
    let theta = Theta::new(rho, tau2, sigma2)?;
    let traj = simulate_lgssm(&theta, INIT, horizon, seed)?;
    let kf = kalman_filter(&theta, INIT, &traj.observations)?;
    let model = lg_densities(theta, INIT)?;
    let mut rng = substream(seed, streams::FILTER);
    let pf = run_filter(&model, &traj.observations, particles, &FilterOptions::default(), &mut rng)?;
    Ok(FilterComparison {
        kalman_sd: kf.filt_var.iter().map(|v| v.sqrt()).collect(),
        kalman_loglik: kf.loglik(),
        kalman_mean: kf.filt_mean,
        particle_mean: pf.systems.iter().map(|s| s.mean()).collect(),
        particle_sd: pf.systems.iter().map(|s| s.variance().sqrt()).collect(),
        ess: pf.systems.iter().map(|s| s.ess()).collect(),
        particle_loglik: pf.loglik(),
        states: traj.states,
        observations: traj.observations,
    })
}

#[wasm_bindgen(js_name = compareFilter)]
pub fn compare_filter(
    rho: f64,
    tau2: f64,
    sigma2: f64,
    horizon: usize,
    particles: usize,
    seed: u64,
) -> Result<FilterComparison, JsError> {
    filter_comparison(rho, tau2, sigma2, horizon, particles, seed).map_err(js)
}

/// Spread of the smoothed sum of `x_{k-1} x_k` across replicates, for the
/// path-space and forward-only smoothers, on a common data set.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct SmoothingStudy {
    pub times: Vec<f64>,
    pub exact: Vec<f64>,
    /// `var(S_n) / n` across replicates.
    pub pathspace_var: Vec<f64>,
    pub forward_var: Vec<f64>,
    pub pathspace_bias: Vec<f64>,
    pub forward_bias: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn smoothing_study(
    rho: f64,
    tau2: f64,
    sigma2: f64,
    horizon: usize,
    particles: usize,
    replicates: usize,
    points: usize,
    seed: u64,
) -> sspe::Result<SmoothingStudy> {
    let theta = Theta::new(rho, tau2, sigma2)?;
    let y = simulate_lgssm(&theta, INIT, horizon, seed)?.observations;
    let points = points.clamp(1, horizon.max(1));
    let mut times: Vec<usize> = (1..=points).map(|k| k * horizon / points).filter(|&n| n > 0).collect();
    times.dedup();
    let s = QuadraticFunctional::lag_product();
    let exact: Vec<f64> = exact_additive_trace(&theta, INIT, &y, &s, &times)?.iter().map(|v| v[0]).collect();
    let cfg = ParticleConfig::new(particles, ProposalKind::Bootstrap);
    let run = |backend: Backend, k: u64| -> sspe::Result<(Vec<f64>, Vec<f64>)> {
        let mut runs = Vec::with_capacity(replicates);
        for r in 0..replicates as u64 {
            let mut rng = substream(replicate_seed(replicate_seed(seed, r), k), streams::SMOOTHER);
            runs.push(additive_trace(backend, &theta, INIT, &y, &s, &cfg, &times, &mut rng)?);
        }
        let mut var = Vec::with_capacity(times.len());
        let mut bias = Vec::with_capacity(times.len());
        for (i, &n) in times.iter().enumerate() {
            let est: Vec<f64> = runs.iter().map(|t| t[i][0]).collect();
            var.push(variance(&est) / n as f64);
            bias.push(mean(&est) - exact[i]);
        }
        Ok((var, bias))
    };
    let (pathspace_var, pathspace_bias) = run(Backend::PathSpace, 0)?;
    let (forward_var, forward_bias) = run(Backend::Forward, 1)?;
    Ok(SmoothingStudy {
        times: times.iter().map(|&n| n as f64).collect(),
        exact,
        pathspace_var,
        forward_var,
        pathspace_bias,
        forward_bias,
    })
}

#[wasm_bindgen(js_name = smoothingVariance)]
#[allow(clippy::too_many_arguments)]
pub fn smoothing_variance(
    rho: f64,
    tau2: f64,
    sigma2: f64,
    horizon: usize,
    particles: usize,
    replicates: usize,
    points: usize,
    seed: u64,
) -> Result<SmoothingStudy, JsError> {
    smoothing_study(rho, tau2, sigma2, horizon, particles, replicates, points, seed).map_err(js)
}

/// Exact posterior of `(rho, sigma2)` on a grid, with `tau2` held at its
/// true value and inverse-gamma(1, 1) / uniform priors.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct PosteriorGrid {
    pub rho: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// Normalised weights, row-major with `sigma2` varying fastest.
    pub weights: Vec<f64>,
    pub rho_marginal: Vec<f64>,
    pub sigma2_marginal: Vec<f64>,
    pub rho_mean: f64,
    pub sigma2_mean: f64,
}

pub fn posterior_grid(
    rho: f64,
    tau2: f64,
    sigma2: f64,
    horizon: usize,
    points: usize,
    seed: u64,
) -> sspe::Result<PosteriorGrid> {
    let theta = Theta::new(rho, tau2, sigma2)?.with_free(FreeMask::new(true, false, true));
    let y = simulate_lgssm(&theta, INIT, horizon, seed)?.observations;
    let points = points.max(2);
    let top = 2.0 * variance(&y).max(sigma2);
    let axes = [
        GridAxis::linspace(Param::Rho, -0.99, 0.99, points),
        GridAxis::linspace(Param::Sigma2, top / points as f64, top, points),
    ];
    let post = grid_posterior(&PriorSpec::default(), &y, &theta, INIT, &axes)?;
    Ok(PosteriorGrid {
        rho: post.axes[0].points.clone(),
        sigma2: post.axes[1].points.clone(),
        rho_marginal: post.marginal(Param::Rho).unwrap_or_default(),
        sigma2_marginal: post.marginal(Param::Sigma2).unwrap_or_default(),
        rho_mean: post.mean(Param::Rho),
        sigma2_mean: post.mean(Param::Sigma2),
        weights: post.weights,
    })
}

#[wasm_bindgen(js_name = posteriorGrid)]
pub fn posterior_grid_js(
    rho: f64,
    tau2: f64,
    sigma2: f64,
    horizon: usize,
    points: usize,
    seed: u64,
) -> Result<PosteriorGrid, JsError> {
    posterior_grid(rho, tau2, sigma2, horizon, points, seed).map_err(js)
}
