//! Exact reference values computed on Kalman grids.

use sspe::bayes::PriorSpec;
use sspe::kalman::grid::{grid_posterior, GridAxis, GridPosterior};
use sspe::model::{InitialLaw, Param, Theta};
use sspe::stats::std_dev;

/// Which surface the grid is centred on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Likelihood,
    Posterior,
}

/// A grid posterior together with the cell width of each axis in the units
/// the axis is uniform in (`rho`, `tau`, `sigma`).
#[derive(Debug, Clone)]
pub struct Grid {
    pub post: GridPosterior,
    pub cells: Vec<(Param, f64)>,
}

impl Grid {
    pub fn cell(&self, p: Param) -> f64 {
        self.cells.iter().find(|c| c.0 == p).map(|c| c.1).unwrap_or(0.0)
    }

    pub fn ml(&self) -> Theta {
        self.post.ml()
    }
}

/// Coordinate in which an axis is laid out uniformly: `rho` itself, the
/// standard deviation for the variances.
fn to_coord(p: Param, v: f64) -> f64 {
    if p == Param::Rho {
        v
    } else {
        v.sqrt()
    }
}

fn from_coord(p: Param, c: f64) -> f64 {
    if p == Param::Rho {
        c
    } else {
        c * c
    }
}

fn axis(p: Param, lo: f64, hi: f64, n: usize) -> GridAxis {
    let pts = (0..n).map(|i| from_coord(p, lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect();
    GridAxis::new(p, pts)
}

/// Grid over the free parameters of `base`: a wide first pass, then
/// `rounds` passes that shrink each axis to the cells carrying
/// non-negligible mass of `target` and re-evaluate with `points` per axis.
pub fn localized_grid(
    prior: &PriorSpec,
    y: &[f64],
    base: &Theta,
    init: InitialLaw,
    points: usize,
    rounds: usize,
    target: Target,
) -> sspe::Result<Grid> {
    let rho_max = if init.depends_on_theta() { 0.999 } else { 1.0 };
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = std_dev(y).max(if dy.len() > 1 { std_dev(&dy) } else { 0.0 }).max(1e-3);
    let mut bounds: Vec<(Param, f64, f64)> = base
        .free
        .free_params()
        .into_iter()
        .map(|p| if p == Param::Rho { (p, -rho_max, rho_max) } else { (p, 1e-3 * scale, 3.0 * scale) })
        .collect();
    let build =
        |b: &[(Param, f64, f64)]| -> Vec<GridAxis> { b.iter().map(|&(p, lo, hi)| axis(p, lo, hi, points)).collect() };
    let mut post = grid_posterior(prior, y, base, init, &build(&bounds))?;
    for _ in 0..rounds {
        let mass = match target {
            Target::Posterior => post.weights.clone(),
            Target::Likelihood => sspe::particle::normalize_log_weights(&post.loglik, 0)?.weights,
        };
        let view = GridPosterior { weights: mass, ..post.clone() };
        for (k, b) in bounds.iter_mut().enumerate() {
            let m = view.marginal(b.0).unwrap();
            let peak = m.iter().copied().fold(0.0, f64::max);
            let keep: Vec<usize> = (0..m.len()).filter(|&i| m[i] > 1e-10 * peak).collect();
            let pts = &post.axes[k].points;
            let lo = to_coord(b.0, pts[keep[0].saturating_sub(1)]);
            let hi = to_coord(b.0, pts[(keep[keep.len() - 1] + 1).min(pts.len() - 1)]);
            let floor = if b.0 == Param::Rho { -rho_max } else { 1e-6 * scale };
            b.1 = lo.max(floor);
            b.2 = hi;
        }
        post = grid_posterior(prior, y, base, init, &build(&bounds))?;
    }
    let cells = bounds.iter().map(|&(p, lo, hi)| (p, (hi - lo) / (points - 1) as f64)).collect();
    Ok(Grid { post, cells })
}
