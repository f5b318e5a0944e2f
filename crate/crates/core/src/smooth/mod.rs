//! Estimators of smoothed additive functionals.
//!
//! * [`pathspace`]: weights of the surviving ancestral paths, `O(N)` per step.
//! * [`fixedlag`]: the path-space estimator with each term frozen `L` steps
//!   after its time, `O(NL)` per step.
//! * [`ffbsm`]: forward filtering backward smoothing, `O(N^2)` per step.
//! * [`ffbsa`]: backward sampling of whole paths (direct or rejection).
//! * [`forward`]: forward-only recursion reproducing FFBSm on-line.
//! * [`paris`]: forward recursion with `K` backward draws per particle.

use std::io::Write;

use rand::Rng;

use crate::error::Result;
use crate::io::fmt_f64;
use crate::model::StateSpaceModel;
use crate::particle::ParticleSystem;

pub mod ffbsa;
pub mod ffbsm;
pub mod fixedlag;
pub mod forward;
pub mod functional;
pub mod paris;
pub mod pathspace;

pub use ffbsa::{ffbsa_sample, BackwardMode, SampledPaths};
pub use ffbsm::{ffbsm, ffbsm_additive, ffbsm_weights, FfbsmResult};
pub use fixedlag::{fixedlag_additive, FixedLagSmoother};
pub use forward::{forward_smooth, ForwardSmoother};
pub use functional::{AdditiveFunctional, FnFunctional, QuadraticFunctional};
pub use paris::{paris_additive, ParisSmoother};
pub use pathspace::{pathspace_additive, PathSpaceSmoother};

/// Convex weighting of the carried value and the new term:
/// `V_n = keep * (carried V_{n-1}) + add * s_n`. Plain smoothing uses
/// `keep = add = 1`; on-line EM uses `keep = 1 - gamma`, `add = gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weighting {
    pub keep: f64,
    pub add: f64,
}

impl Weighting {
    pub const PLAIN: Weighting = Weighting { keep: 1.0, add: 1.0 };

    pub fn step_size(gamma: f64) -> Self {
        Weighting { keep: 1.0 - gamma, add: gamma }
    }
}

/// A smoother that consumes filter steps as they are produced.
pub trait OnlineSmoother {
    fn dim(&self) -> usize;

    /// Incorporates the newest system `cur` (with `prev` its predecessor,
    /// `None` at time 0). `y` is the observation at the time of `cur`.
    #[allow(clippy::too_many_arguments)]
    fn update<M, S, R>(
        &mut self,
        model: &M,
        s: &S,
        prev: Option<&ParticleSystem>,
        cur: &ParticleSystem,
        y: f64,
        weighting: Weighting,
        rng: &mut R,
    ) -> Result<()>
    where
        M: StateSpaceModel + ?Sized,
        S: AdditiveFunctional + ?Sized,
        R: Rng + ?Sized;

    /// Per-particle values `V_n(X_n^i)`, row-major with `dim` columns.
    fn values(&self) -> &[f64];

    /// `S_hat_n = sum_i W_n^i V_n(X_n^i)`.
    fn estimate(&self, cur: &ParticleSystem) -> Vec<f64> {
        weighted_rows(self.values(), &cur.norm_weights, self.dim())
    }
}

pub(crate) fn weighted_rows(values: &[f64], weights: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (row, w) in values.chunks_exact(dim.max(1)).zip(weights) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += w * v;
        }
    }
    if dim == 0 {
        out.clear();
    }
    out
}

/// Initial values `V_0(x_0) = add * s_0(x_0)` (or 0 without an initial term).
pub(crate) fn initial_values<S: AdditiveFunctional + ?Sized>(
    s: &S,
    cur: &ParticleSystem,
    y0: f64,
    add: f64,
    out: &mut Vec<f64>,
) {
    let dim = s.dim();
    out.clear();
    out.resize(cur.len() * dim, 0.0);
    if s.has_initial_term() {
        for (i, row) in out.chunks_exact_mut(dim.max(1)).enumerate().take(cur.len()) {
            s.initial(cur.positions[i], y0, row);
            row.iter_mut().for_each(|v| *v *= add);
        }
    }
}

/// `ln W^i` of a system computed from its log weights.
pub(crate) fn log_norm_weights(sys: &ParticleSystem) -> Vec<f64> {
    let lse = crate::particle::log_sum_exp(&sys.log_weights);
    sys.log_weights.iter().map(|l| l - lse).collect()
}

/// Backward kernel row: `out_i ∝ W^i f(x | X^i)`, normalised to sum to one.
/// Returns `false` when every entry vanishes.
#[inline]
pub(crate) fn backward_row<M: StateSpaceModel + ?Sized>(
    model: &M,
    positions: &[f64],
    ln_w: &[f64],
    x: f64,
    out: &mut Vec<f64>,
) -> bool {
    out.clear();
    let mut max = f64::NEG_INFINITY;
    for (xp, lw) in positions.iter().zip(ln_w) {
        let l = lw + model.trans_logpdf(x, *xp);
        max = max.max(l);
        out.push(l);
    }
    if max == f64::NEG_INFINITY || max.is_nan() {
        return false;
    }
    let mut tot = 0.0;
    for v in out.iter_mut() {
        *v = (*v - max).exp();
        tot += *v;
    }
    let inv = 1.0 / tot;
    out.iter_mut().for_each(|v| *v *= inv);
    true
}

/// CSV `n,estimator,component,value` for per-time estimates.
pub fn write_trace_csv<W: Write>(
    mut w: W,
    estimator: &str,
    times: &[usize],
    values: &[Vec<f64>],
) -> std::io::Result<()> {
    writeln!(w, "n,estimator,component,value")?;
    for (n, v) in times.iter().zip(values) {
        for (c, x) in v.iter().enumerate() {
            writeln!(w, "{n},{estimator},{c},{}", fmt_f64(*x))?;
        }
    }
    Ok(())
}
