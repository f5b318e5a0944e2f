//! M-step for the linear-Gaussian model.
//!
//! The statistic is the time-average `z = S_T / T` of
//! `((y_k - x_k)^2, x_{k-1}^2, x_{k-1} x_k, x_k^2, x_0^2)`, where the first
//! component also carries the `k = 0` residual and the fifth only the `k = 0`
//! state. Maximising the expected complete-data log-likelihood gives
//!
//! ```text
//! rho    = z3 / z2
//! tau2   = z4 - z3^2 / z2
//! sigma2 = z1 * T / (T + 1)
//! ```
//!
//! when the initial law does not depend on theta. Under the stationary
//! initial law the `(rho, tau2)` block has no closed form and is maximised
//! along the one-dimensional profile in `rho`.

use crate::error::{Error, Result};
use crate::model::{InitialLaw, Param, Theta};

/// How the `x_0` term enters the M-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialTerm {
    /// Initial law independent of `(rho, tau2)`.
    Ignore,
    /// `x_0 ~ N(0, tau2 / (1 - rho^2))`.
    Stationary,
}

impl InitialTerm {
    pub fn from_law(law: InitialLaw) -> Self {
        match law {
            InitialLaw::Stationary => InitialTerm::Stationary,
            InitialLaw::Fixed { .. } => InitialTerm::Ignore,
        }
    }
}

/// Raw M-step output; variances may be zero on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct MStep {
    pub rho: f64,
    pub tau2: f64,
    pub sigma2: f64,
    /// Parameters whose maximiser sits on (or beyond) the boundary of the
    /// parameter set.
    pub boundary: Vec<Param>,
}

pub const VARIANCE_FLOOR: f64 = 1e-10;
const STATIONARY_RHO_MAX: f64 = 1.0 - 1e-9;

impl MStep {
    /// Projects onto the valid set and keeps fixed components of `base`.
    pub fn to_theta(&self, base: &Theta) -> Theta {
        let mut out = *base;
        if base.free.rho {
            out.rho = self.rho.clamp(-1.0, 1.0);
        }
        if base.free.tau2 {
            out.tau2 = self.tau2.max(VARIANCE_FLOOR);
        }
        if base.free.sigma2 {
            out.sigma2 = self.sigma2.max(VARIANCE_FLOOR);
        }
        out
    }
}

/// Batch M-step from `z = S_T / T`. Fixed components of `base` pass through.
pub fn lambda_map(z: &[f64], horizon: usize, base: &Theta, init: InitialTerm) -> Result<MStep> {
    if horizon == 0 {
        return Err(Error::InvalidStatistic("horizon must be >= 1".into()));
    }
    let t = horizon as f64;
    let get = |i: usize| z.get(i).copied().unwrap_or(0.0);
    check(z, base)?;
    let (r, c, b, a, m0) = (t * get(0), t * get(1), t * get(2), t * get(3), t * get(4));
    let mut boundary = Vec::new();

    let sigma2 = if base.free.sigma2 { r / (t + 1.0) } else { base.sigma2 };

    let (mut rho, tau2) = match init {
        InitialTerm::Ignore => {
            let rho = if base.free.rho { b / c } else { base.rho };
            let tau2 = if base.free.tau2 { (a - 2.0 * rho * b + rho * rho * c) / t } else { base.tau2 };
            (rho, tau2)
        }
        InitialTerm::Stationary => {
            // Quadratic part of the expected transition + initial residual:
            // q(rho) = (c - m0) rho^2 - 2 b rho + (m0 + a).
            let qa = c - m0;
            let qc = m0 + a;
            let q = move |rho: f64| qa * rho * rho - 2.0 * b * rho + qc;
            let rho = if base.free.rho {
                if base.free.tau2 {
                    maximize_on_unit(|p| -0.5 * (t + 1.0) * q(p).max(f64::MIN_POSITIVE).ln() + 0.5 * (1.0 - p * p).ln())
                } else {
                    let t2 = base.tau2;
                    maximize_on_unit(|p| 0.5 * (1.0 - p * p).ln() - q(p) / (2.0 * t2))
                }
            } else {
                base.rho
            };
            let tau2 = if base.free.tau2 { q(rho) / (t + 1.0) } else { base.tau2 };
            (rho, tau2)
        }
    };

    if base.free.rho {
        // rho = 1 is admissible when the initial law does not involve rho.
        let (limit, hit) = match init {
            InitialTerm::Ignore => (1.0, rho.abs() > 1.0),
            InitialTerm::Stationary => (STATIONARY_RHO_MAX, rho.abs() >= STATIONARY_RHO_MAX),
        };
        if hit {
            boundary.push(Param::Rho);
            rho = rho.clamp(-limit, limit);
        }
    }
    if base.free.tau2 && tau2 <= VARIANCE_FLOOR {
        boundary.push(Param::Tau2);
    }
    if base.free.sigma2 && sigma2 <= VARIANCE_FLOOR {
        boundary.push(Param::Sigma2);
    }
    Ok(MStep { rho, tau2, sigma2, boundary })
}

/// M-step on a normalised running average (on-line EM): every component of
/// `z` is already an average, and the `x_0` term is ignored.
pub fn lambda_map_averaged(z: &[f64], base: &Theta) -> Result<MStep> {
    check(z, base)?;
    let mut boundary = Vec::new();
    let mut rho = if base.free.rho { z[2] / z[1] } else { base.rho };
    let tau2 = if base.free.tau2 { z[3] - 2.0 * rho * z[2] + rho * rho * z[1] } else { base.tau2 };
    let sigma2 = if base.free.sigma2 { z[0] } else { base.sigma2 };
    if base.free.rho && rho.abs() > 1.0 {
        boundary.push(Param::Rho);
        rho = rho.clamp(-1.0, 1.0);
    }
    if base.free.tau2 && tau2 <= VARIANCE_FLOOR {
        boundary.push(Param::Tau2);
    }
    if base.free.sigma2 && sigma2 <= VARIANCE_FLOOR {
        boundary.push(Param::Sigma2);
    }
    Ok(MStep { rho, tau2, sigma2, boundary })
}

fn check(z: &[f64], base: &Theta) -> Result<()> {
    if z.len() < 4 {
        return Err(Error::InvalidStatistic(format!("expected at least 4 components, got {}", z.len())));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidStatistic("non-finite component".into()));
    }
    if (base.free.rho || base.free.tau2) && !(z[1] > 0.0) {
        return Err(Error::InvalidStatistic(format!("z2 = {} must be > 0", z[1])));
    }
    if (base.free.rho || base.free.tau2) && !(z[3] > 0.0) {
        return Err(Error::InvalidStatistic(format!("z4 = {} must be > 0", z[3])));
    }
    Ok(())
}

/// Maximiser of a unimodal-ish function on `(-1, 1)`: coarse scan then
/// golden-section refinement around the best grid point.
pub(crate) fn maximize_on_unit(f: impl Fn(f64) -> f64) -> f64 {
    const GRID: usize = 4000;
    let h = 2.0 / GRID as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 1..GRID {
        let v = f(-1.0 + i as f64 * h);
        if v > best.1 {
            best = (i, v);
        }
    }
    let (mut lo, mut hi) = (-1.0 + (best.0 - 1) as f64 * h, -1.0 + (best.0 + 1) as f64 * h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}
