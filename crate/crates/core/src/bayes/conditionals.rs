//! Exact full conditionals of `theta` given a latent path.
//!
//! With `n` transitions and prior `rho ~ U[-1, 1]`, `tau2 ~ IG(a, b)`,
//! `sigma2 ~ IG(c, d)`:
//!
//! ```text
//! sigma2 | x, y    ~ IG(c + (n+1)/2, d + resid_sq / 2)
//! tau2 | rho, x    ~ IG(a + n/2, b + Q(rho) / 2)          (fixed initial law)
//! rho | tau2, x    ~ N(lag / prev_sq, tau2 / prev_sq) on [-1, 1]
//! ```
//!
//! where `Q(rho) = sum (x_k - rho x_{k-1})^2`. Under the stationary initial
//! law `x_0` adds `(1 - rho^2) x_0^2` to `Q` and one half to the `tau2`
//! shape, and the `rho` conditional gains a factor `sqrt(1 - rho^2)`, handled
//! by rejection.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use super::prior::{inv_gamma_sample, PriorSpec};
use super::suffstats::SuffStats;
use crate::error::Result;
use crate::model::{InitialLaw, Theta};

/// One Gibbs sweep `sigma2 -> tau2 -> rho` over the free components.
pub fn lg_theta_conditionals<R: Rng + ?Sized>(
    stats: &SuffStats,
    prior: &PriorSpec,
    current: &Theta,
    init: InitialLaw,
    rng: &mut R,
) -> Result<Theta> {
    let mut t = *current;
    let n = stats.count as f64;
    let stationary = init.depends_on_theta();
    if t.free.sigma2 {
        t.sigma2 = inv_gamma_sample(prior.c + 0.5 * (n + 1.0), prior.d + 0.5 * stats.resid_sq, rng);
    }
    if t.free.tau2 {
        let q = stats.trans_residual(t.rho);
        t.tau2 = if stationary {
            let extra = (1.0 - t.rho * t.rho) * stats.x0_sq;
            inv_gamma_sample(prior.a + 0.5 * (n + 1.0), prior.b + 0.5 * (q + extra), rng)
        } else {
            inv_gamma_sample(prior.a + 0.5 * n, prior.b + 0.5 * q, rng)
        };
    }
    if t.free.rho {
        t.rho = if stationary { rho_stationary(stats, t.tau2, rng) } else { rho_fixed(stats, t.tau2, rng) };
    }
    Ok(t)
}

/// Gibbs sweep from an explicit path `x_{0:T}` and data `y_{0:T}`.
pub fn conditionals_from_path<R: Rng + ?Sized>(
    x: &[f64],
    y: &[f64],
    prior: &PriorSpec,
    current: &Theta,
    init: InitialLaw,
    rng: &mut R,
) -> Result<Theta> {
    lg_theta_conditionals(&SuffStats::from_path(x, y), prior, current, init, rng)
}

fn rho_fixed<R: Rng + ?Sized>(s: &SuffStats, tau2: f64, rng: &mut R) -> f64 {
    if !(s.prev_sq > 0.0) {
        return rng.random_range(-1.0..=1.0);
    }
    truncated_normal(s.lag / s.prev_sq, (tau2 / s.prev_sq).sqrt(), -1.0, 1.0, rng)
}

fn rho_stationary<R: Rng + ?Sized>(s: &SuffStats, tau2: f64, rng: &mut R) -> f64 {
    // Density ∝ sqrt(1 - rho^2) exp(-[rho^2 (prev_sq - x0_sq) - 2 rho lag] / (2 tau2)).
    let a = s.prev_sq - s.x0_sq;
    loop {
        let rho = if a > 1e-300 {
            truncated_normal(s.lag / a, (tau2 / a).sqrt(), -1.0, 1.0, rng)
        } else {
            // Exponential tilt only: propose uniformly, accept on the tilt.
            let r: f64 = rng.random_range(-1.0..=1.0);
            let log_acc = (r - s.lag.signum()) * s.lag / tau2;
            if rng.random::<f64>().ln() >= log_acc {
                continue;
            }
            r
        };
        if rng.random::<f64>() < (1.0 - rho * rho).max(0.0).sqrt() {
            return rho;
        }
    }
}

/// `N(mean, sd^2)` truncated to `[lo, hi]`.
pub fn truncated_normal<R: Rng + ?Sized>(mean: f64, sd: f64, lo: f64, hi: f64, rng: &mut R) -> f64 {
    assert!(lo < hi && sd > 0.0);
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    let z = if a <= 0.0 && b >= 0.0 {
        std_truncated_around_zero(a, b, rng)
    } else if a > 0.0 {
        std_truncated_tail(a, b, rng)
    } else {
        -std_truncated_tail(-b, -a, rng)
    };
    (mean + sd * z).clamp(lo, hi)
}

/// Standard normal on `[a, b]` with `a <= 0 <= b`.
fn std_truncated_around_zero<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let std = Normal::standard();
    let mass = std.cdf(b) - std.cdf(a);
    if mass > 0.25 {
        loop {
            let z: f64 = rng.sample(StandardNormal);
            if z >= a && z <= b {
                return z;
            }
        }
    }
    // Narrow interval around 0: uniform proposal, acceptance exp(-z^2/2) <= 1.
    loop {
        let z = rng.random_range(a..=b);
        if rng.random::<f64>() < (-0.5 * z * z).exp() {
            return z;
        }
    }
}

/// Standard normal on `[a, b]` with `0 < a < b` (b may be infinite).
fn std_truncated_tail<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let width = b - a;
    if width < 1.0 / a.max(1e-300) || width < 0.5 {
        // Uniform proposal, envelope exp(-a^2/2).
        loop {
            let z = rng.random_range(a..=b);
            if rng.random::<f64>().ln() < 0.5 * (a * a - z * z) {
                return z;
            }
        }
    }
    // Exponential proposal with the optimal rate.
    let lambda = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let e: f64 = rng.sample(Exp1);
        let z = a + e / lambda;
        if z > b {
            continue;
        }
        let d = z - lambda;
        if rng.random::<f64>().ln() < -0.5 * d * d {
            return z;
        }
    }
}
