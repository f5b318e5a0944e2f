//! Exact parameter posteriors on a grid of at most two free parameters.

use std::io::Write;

use rayon::prelude::*;

use crate::bayes::prior::PriorSpec;
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::kalman::kalman_loglik;
use crate::model::{check_observations, InitialLaw, Param, Theta};
use crate::particle::normalize_log_weights;

/// Grid points for one free parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub param: Param,
    pub points: Vec<f64>,
}

impl GridAxis {
    pub fn new(param: Param, points: Vec<f64>) -> Self {
        GridAxis { param, points }
    }

    /// `n` evenly spaced points on `[lo, hi]` (a single point at `lo` when `n = 1`).
    pub fn linspace(param: Param, lo: f64, hi: f64, n: usize) -> Self {
        let points =
            if n <= 1 { vec![lo] } else { (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect() };
        GridAxis { param, points }
    }

    /// Width of one cell (0 for a single point).
    pub fn cell_width(&self) -> f64 {
        if self.points.len() < 2 {
            0.0
        } else {
            (self.points[self.points.len() - 1] - self.points[0]) / (self.points.len() - 1) as f64
        }
    }
}

/// Posterior `p(theta | y)` on a product grid. Points are stored row-major
/// with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    pub axes: Vec<GridAxis>,
    pub base: Theta,
    pub loglik: Vec<f64>,
    pub log_unnorm: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GridPosterior {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Parameter value of grid point `idx`.
    pub fn theta_at(&self, idx: usize) -> Theta {
        let mut t = self.base;
        let mut rem = idx;
        for axis in self.axes.iter().rev() {
            let n = axis.points.len();
            t.set(axis.param, axis.points[rem % n]);
            rem /= n;
        }
        t
    }

    fn axis_index(&self, p: Param) -> Option<usize> {
        self.axes.iter().position(|a| a.param == p)
    }

    /// Marginal weights along the axis of `p`.
    pub fn marginal(&self, p: Param) -> Option<Vec<f64>> {
        let k = self.axis_index(p)?;
        let mut out = vec![0.0; self.axes[k].points.len()];
        let inner: usize = self.axes[k + 1..].iter().map(|a| a.points.len()).product();
        let n = self.axes[k].points.len();
        for (idx, w) in self.weights.iter().enumerate() {
            out[(idx / inner) % n] += w;
        }
        Some(out)
    }

    /// Posterior mean of `p` (its fixed value when `p` is not on the grid).
    pub fn mean(&self, p: Param) -> f64 {
        match self.axis_index(p) {
            None => self.base.get(p),
            Some(k) => {
                let m = self.marginal(p).unwrap();
                m.iter().zip(&self.axes[k].points).map(|(w, x)| w * x).sum()
            }
        }
    }

    pub fn var(&self, p: Param) -> f64 {
        match self.axis_index(p) {
            None => 0.0,
            Some(k) => {
                let mu = self.mean(p);
                let m = self.marginal(p).unwrap();
                m.iter().zip(&self.axes[k].points).map(|(w, x)| w * (x - mu) * (x - mu)).sum()
            }
        }
    }

    /// Grid point of maximal posterior density.
    pub fn map(&self) -> Theta {
        self.theta_at(argmax(&self.log_unnorm))
    }

    /// Grid point of maximal likelihood.
    pub fn ml(&self) -> Theta {
        self.theta_at(argmax(&self.loglik))
    }

    /// CSV `param1,param2,log_unnorm,weight`; `param2` is empty for one axis.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "param1,param2,log_unnorm,weight")?;
        for idx in 0..self.len() {
            let t = self.theta_at(idx);
            let p1 = self.axes.first().map(|a| fmt_f64(t.get(a.param))).unwrap_or_default();
            let p2 = self.axes.get(1).map(|a| fmt_f64(t.get(a.param))).unwrap_or_default();
            writeln!(w, "{p1},{p2},{},{}", fmt_f64(self.log_unnorm[idx]), fmt_f64(self.weights[idx]))?;
        }
        Ok(())
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Exact grid posterior. The free components of `base` must match the grid
/// axes one to one; fixed components are held at their `base` values.
pub fn grid_posterior(
    prior: &PriorSpec,
    y: &[f64],
    base: &Theta,
    init: InitialLaw,
    axes: &[GridAxis],
) -> Result<GridPosterior> {
    check_observations(y)?;
    prior.validate()?;
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidGrid(format!("expected 1 or 2 axes, got {}", axes.len())));
    }
    let free = base.free.free_params();
    if free.len() != axes.len() || !axes.iter().all(|a| free.contains(&a.param)) {
        return Err(Error::InvalidGrid("axes must match the free parameters".into()));
    }
    if axes.len() == 2 && axes[0].param == axes[1].param {
        return Err(Error::InvalidGrid("duplicate axis".into()));
    }
    for axis in axes {
        if axis.points.is_empty() {
            return Err(Error::InvalidGrid(format!("empty axis for {}", axis.param.name())));
        }
        for &x in &axis.points {
            let strict_rho = axis.param == Param::Rho && init.depends_on_theta() && x.abs() >= 1.0;
            if !prior.in_support(axis.param, x) || strict_rho {
                return Err(Error::InvalidGrid(format!("{} = {x} outside the support", axis.param.name())));
            }
        }
    }
    let total: usize = axes.iter().map(|a| a.points.len()).product();
    let mut post = GridPosterior {
        axes: axes.to_vec(),
        base: *base,
        loglik: Vec::new(),
        log_unnorm: Vec::new(),
        weights: Vec::new(),
    };
    let loglik: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let t = post.theta_at(idx);
            kalman_loglik(&t, init, y)
        })
        .collect::<Result<_>>()?;
    let log_unnorm: Vec<f64> = (0..total).map(|idx| loglik[idx] + prior.logpdf(&post.theta_at(idx))).collect();
    post.weights = normalize_log_weights(&log_unnorm, 0)
        .map_err(|_| Error::InvalidGrid("posterior vanishes on every grid point".into()))?
        .weights;
    post.loglik = loglik;
    post.log_unnorm = log_unnorm;
    Ok(post)
}

/// Repeatedly shrinks each axis to the region carrying non-negligible
/// marginal mass and re-evaluates with `n_points` per axis. Useful when the
/// posterior is concentrated relative to the prior support.
pub fn adaptive_grid_posterior(
    prior: &PriorSpec,
    y: &[f64],
    base: &Theta,
    init: InitialLaw,
    axes: &[GridAxis],
    n_points: usize,
    rounds: usize,
) -> Result<GridPosterior> {
    let mut post = grid_posterior(prior, y, base, init, axes)?;
    for _ in 0..rounds {
        let mut next = Vec::with_capacity(post.axes.len());
        for axis in &post.axes {
            let m = post.marginal(axis.param).unwrap();
            let peak = m.iter().copied().fold(0.0, f64::max);
            let keep: Vec<usize> = (0..m.len()).filter(|&i| m[i] > 1e-10 * peak).collect();
            let lo_i = keep[0].saturating_sub(1);
            let hi_i = (keep[keep.len() - 1] + 1).min(axis.points.len() - 1);
            let (lo, hi) = (axis.points[lo_i], axis.points[hi_i]);
            next.push(GridAxis::linspace(axis.param, lo, hi, n_points));
        }
        post = grid_posterior(prior, y, base, init, &next)?;
    }
    Ok(post)
}
