//! SMC over `(theta, x_n)` with a Gibbs refresh of `theta`.
//!
//! Each particle carries its own parameter, latent state and the sufficient
//! statistics of its ancestral path. After resampling, `theta` is redrawn
//! from its exact conditional given those statistics, which leaves the
//! joint posterior invariant and keeps the parameter particles diverse.
//! Without the refresh the sampler is plain importance sampling on
//! `theta`, and the number of distinct parameter values can only shrink.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;

use super::conditionals::lg_theta_conditionals;
use super::prior::PriorSpec;
use super::suffstats::SuffStats;
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::model::{check_observations, normal_logpdf, InitialLaw, ProposalKind, Theta};
use crate::particle::{normalize_into, resample_into, ResamplingScheme};
use crate::rng::{streams, substream};

#[derive(Debug, Clone, PartialEq)]
pub struct MwsOptions {
    pub n: usize,
    pub init: InitialLaw,
    pub proposal: ProposalKind,
    pub scheme: ResamplingScheme,
    /// Gibbs refresh of `theta` after each resampling step.
    pub refresh: bool,
    /// Diversity diagnostics are computed every this many steps (and at the end).
    pub diagnostics_every: usize,
}

impl Default for MwsOptions {
    fn default() -> Self {
        MwsOptions {
            n: 1000,
            init: InitialLaw::Stationary,
            proposal: ProposalKind::Bootstrap,
            scheme: ResamplingScheme::Multinomial,
            refresh: true,
            diagnostics_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MwsOutput {
    /// Posterior mean of `(rho, tau2, sigma2)` given `y_{0:n}`, for every `n`.
    pub post_mean: Vec<[f64; 3]>,
    pub post_var: Vec<[f64; 3]>,
    /// `log p_hat(y_{0:n})`.
    pub loglik: Vec<f64>,
    pub diag_times: Vec<usize>,
    /// Distinct values of the free parameters among the particles.
    pub unique_theta: Vec<usize>,
    /// Distinct time-0 ancestors among the particles.
    pub unique_ancestors: Vec<usize>,
    pub final_thetas: Vec<Theta>,
    pub final_weights: Vec<f64>,
}

impl MwsOutput {
    /// CSV `n,unique_theta,unique_ancestors`.
    pub fn write_diagnostics_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,unique_theta,unique_ancestors")?;
        for (k, t) in self.diag_times.iter().enumerate() {
            writeln!(w, "{t},{},{}", self.unique_theta[k], self.unique_ancestors[k])?;
        }
        Ok(())
    }

    /// CSV `n,rho_mean,tau2_mean,sigma2_mean,rho_var,tau2_var,sigma2_var,loglik`.
    pub fn write_moments_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,rho_mean,tau2_mean,sigma2_mean,rho_var,tau2_var,sigma2_var,loglik")?;
        for (n, (m, v)) in self.post_mean.iter().zip(&self.post_var).enumerate() {
            writeln!(
                w,
                "{n},{},{},{},{},{},{},{}",
                fmt_f64(m[0]),
                fmt_f64(m[1]),
                fmt_f64(m[2]),
                fmt_f64(v[0]),
                fmt_f64(v[1]),
                fmt_f64(v[2]),
                fmt_f64(self.loglik[n])
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Particle {
    x: f64,
    theta: Theta,
    stats: SuffStats,
    root: u32,
}

/// Propagates `x` under `theta` and returns `(x_new, log weight)`.
#[inline]
fn propagate<R: Rng + ?Sized>(kind: ProposalKind, t: &Theta, x: f64, y: f64, rng: &mut R) -> (f64, f64) {
    let z: f64 = rng.sample(StandardNormal);
    let m = t.rho * x;
    match kind {
        ProposalKind::Bootstrap => {
            let xn = m + t.tau2.sqrt() * z;
            (xn, normal_logpdf(y, xn, t.sigma2))
        }
        ProposalKind::Optimal => {
            let (mean, var) = posterior(m, t.tau2, y, t.sigma2);
            (mean + var.sqrt() * z, normal_logpdf(y, m, t.tau2 + t.sigma2))
        }
    }
}

/// Moments of `x | y` when `x ~ N(m, v)` and `y | x ~ N(x, s2)`.
#[inline]
fn posterior(m: f64, v: f64, y: f64, s2: f64) -> (f64, f64) {
    let var = v * s2 / (v + s2);
    (var * (m / v + y / s2), var)
}

/// Runs the sampler over `y`. The free components of `base` are sampled
/// from the prior at time 0; fixed components are held at their values.
pub fn mcmc_within_smc(y: &[f64], prior: &PriorSpec, base: &Theta, opts: &MwsOptions, seed: u64) -> Result<MwsOutput> {
    check_observations(y)?;
    prior.validate()?;
    base.validate()?;
    if opts.n == 0 {
        return Err(Error::InvalidParameter("particle count must be >= 1".into()));
    }
    if opts.diagnostics_every == 0 {
        return Err(Error::InvalidParameter("diagnostics_every must be >= 1".into()));
    }
    let n = opts.n;
    let mut rng = substream(seed, streams::MCMC);
    let mut parts = Vec::with_capacity(n);
    let mut logw = Vec::with_capacity(n);
    for i in 0..n {
        let mut theta = prior.sample(base, &mut rng);
        if opts.init.depends_on_theta() && theta.rho.abs() >= 1.0 {
            theta.rho = theta.rho.clamp(-1.0 + 1e-12, 1.0 - 1e-12);
        }
        let (m0, v0) = opts.init.moments(&theta)?;
        let z: f64 = rng.sample(StandardNormal);
        let (x, lw) = match opts.proposal {
            ProposalKind::Bootstrap => {
                let x = m0 + v0.sqrt() * z;
                (x, normal_logpdf(y[0], x, theta.sigma2))
            }
            ProposalKind::Optimal => {
                let (m, v) = posterior(m0, v0, y[0], theta.sigma2);
                (m + v.sqrt() * z, normal_logpdf(y[0], m0, v0 + theta.sigma2))
            }
        };
        parts.push(Particle { x, theta, stats: SuffStats::initial(x, y[0]), root: i as u32 });
        logw.push(lw);
    }
    let mut w = Vec::with_capacity(n);
    let mut out = MwsOutput {
        post_mean: Vec::with_capacity(y.len()),
        post_var: Vec::with_capacity(y.len()),
        loglik: Vec::with_capacity(y.len()),
        diag_times: Vec::new(),
        unique_theta: Vec::new(),
        unique_ancestors: Vec::new(),
        final_thetas: Vec::new(),
        final_weights: Vec::new(),
    };
    let mut ll = normalize_into(&logw, &mut w, 0)?;
    record(&mut out, &parts, &w, ll, 0, y.len(), base, opts.diagnostics_every);

    let mut anc = Vec::with_capacity(n);
    let mut next = Vec::with_capacity(n);
    for (t, &yt) in y.iter().enumerate().skip(1) {
        resample_into(&w, n, opts.scheme, &mut rng, &mut anc);
        next.clear();
        next.extend(anc.iter().map(|&a| parts[a]));
        std::mem::swap(&mut parts, &mut next);
        logw.clear();
        for p in parts.iter_mut() {
            if opts.refresh {
                p.theta = lg_theta_conditionals(&p.stats, prior, &p.theta, opts.init, &mut rng)?;
            }
            let (xn, lw) = propagate(opts.proposal, &p.theta, p.x, yt, &mut rng);
            p.stats.update(p.x, xn, yt);
            p.x = xn;
            logw.push(lw);
        }
        ll += normalize_into(&logw, &mut w, t)?;
        record(&mut out, &parts, &w, ll, t, y.len(), base, opts.diagnostics_every);
    }
    out.final_thetas = parts.iter().map(|p| p.theta).collect();
    out.final_weights = w;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn record(
    out: &mut MwsOutput,
    parts: &[Particle],
    w: &[f64],
    ll: f64,
    t: usize,
    len: usize,
    base: &Theta,
    every: usize,
) {
    let mut mean = [0.0; 3];
    for (p, wi) in parts.iter().zip(w) {
        let a = p.theta.as_array();
        for k in 0..3 {
            mean[k] += wi * a[k];
        }
    }
    let mut var = [0.0; 3];
    for (p, wi) in parts.iter().zip(w) {
        let a = p.theta.as_array();
        for k in 0..3 {
            var[k] += wi * (a[k] - mean[k]) * (a[k] - mean[k]);
        }
    }
    out.post_mean.push(mean);
    out.post_var.push(var);
    out.loglik.push(ll);
    if t.is_multiple_of(every) || t + 1 == len {
        let free = base.free.free_params();
        let mut keys: Vec<[u64; 3]> = parts
            .iter()
            .map(|p| {
                let mut k = [0u64; 3];
                for q in &free {
                    k[q.index()] = p.theta.get(*q).to_bits();
                }
                k
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let mut roots: Vec<u32> = parts.iter().map(|p| p.root).collect();
        roots.sort_unstable();
        roots.dedup();
        out.diag_times.push(t);
        out.unique_theta.push(keys.len());
        out.unique_ancestors.push(roots.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kalman::grid::{grid_posterior, GridAxis};
    use crate::kalman::kalman_loglik;
    use crate::model::{simulate_lgssm, FreeMask, Param};

    #[test]
    fn without_refresh_diversity_never_grows() {
        let th = Theta::new(0.5, 1.0, 1.0).unwrap().with_free(FreeMask::new(true, false, false));
        let y = simulate_lgssm(&th, InitialLaw::Stationary, 60, 2).unwrap().observations;
        let opts = MwsOptions { n: 300, refresh: false, ..Default::default() };
        let out = mcmc_within_smc(&y, &PriorSpec::default(), &th, &opts, 7).unwrap();
        assert!(out.unique_theta.windows(2).all(|w| w[1] <= w[0]));
        assert!(out.unique_ancestors.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn fixed_theta_reduces_to_a_filter() {
        // All components fixed: the likelihood estimate targets the Kalman value.
        let th = Theta::new(0.6, 0.5, 1.0).unwrap().with_free(FreeMask::NONE);
        let y = simulate_lgssm(&th, InitialLaw::Stationary, 40, 3).unwrap().observations;
        let opts = MwsOptions { n: 2000, proposal: ProposalKind::Optimal, ..Default::default() };
        let out = mcmc_within_smc(&y, &PriorSpec::default(), &th, &opts, 1).unwrap();
        let exact = kalman_loglik(&th, InitialLaw::Stationary, &y).unwrap();
        assert!((out.loglik.last().unwrap() - exact).abs() < 0.3);
    }

    #[test]
    fn posterior_mean_close_to_grid() {
        let law = InitialLaw::Fixed { mean: 0.0, var: 1.0 };
        let th = Theta::new(0.5, 1.0, 1.0).unwrap().with_free(FreeMask::new(false, false, true));
        let y = simulate_lgssm(&th, law, 100, 8).unwrap().observations;
        let opts = MwsOptions { n: 3000, init: law, ..Default::default() };
        let out = mcmc_within_smc(&y, &PriorSpec::default(), &th, &opts, 4).unwrap();
        let g =
            grid_posterior(&PriorSpec::default(), &y, &th, law, &[GridAxis::linspace(Param::Sigma2, 0.05, 5.0, 600)])
                .unwrap();
        let m = out.post_mean.last().unwrap()[2];
        let sd = g.var(Param::Sigma2).sqrt();
        assert!((m - g.mean(Param::Sigma2)).abs() < 0.5 * sd, "{m} vs {}", g.mean(Param::Sigma2));
    }
}
