//! Fixed-dimensional sufficient statistics of a linear-Gaussian path.
//!
//! With `n` transitions the complete-data likelihood depends on the path
//! only through
//!
//! ```text
//! lag     = sum_{k=1}^n x_{k-1} x_k      prev_sq = sum_{k=1}^n x_{k-1}^2
//! cur_sq  = sum_{k=1}^n x_k^2            diff_sq = sum_{k=1}^n (x_k - x_{k-1})^2
//! resid_sq = sum_{k=0}^n (y_k - x_k)^2   x0_sq   = x_0^2
//! ```
//!
//! The two-statistic view `(diff_sq, resid_sq)` suffices when `rho = 1` is
//! known; the three-statistic view `(lag, prev_sq, resid_sq)` when `tau2` is
//! known.

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SuffStats {
    pub lag: f64,
    pub prev_sq: f64,
    pub cur_sq: f64,
    pub diff_sq: f64,
    pub resid_sq: f64,
    pub x0_sq: f64,
    /// Number of transitions `n`.
    pub count: usize,
}

impl SuffStats {
    /// Statistics of the single point `(x_0, y_0)`.
    pub fn initial(x0: f64, y0: f64) -> Self {
        let r = y0 - x0;
        SuffStats { resid_sq: r * r, x0_sq: x0 * x0, ..Default::default() }
    }

    /// Appends the transition `x_prev -> x` with observation `y` of `x`.
    #[inline]
    pub fn update(&mut self, x_prev: f64, x: f64, y: f64) {
        let r = y - x;
        let d = x - x_prev;
        self.lag += x_prev * x;
        self.prev_sq += x_prev * x_prev;
        self.cur_sq += x * x;
        self.diff_sq += d * d;
        self.resid_sq += r * r;
        self.count += 1;
    }

    /// Statistics of a whole path `x_{0:T}` with observations `y_{0:T}`.
    pub fn from_path(x: &[f64], y: &[f64]) -> Self {
        assert_eq!(x.len(), y.len());
        let mut s = SuffStats::initial(x[0], y[0]);
        for k in 1..x.len() {
            s.update(x[k - 1], x[k], y[k]);
        }
        s
    }

    /// Statistics of the transitions only (no `k = 0` terms) of a segment.
    pub fn transitions(x: &[f64], y: &[f64]) -> Self {
        let mut s = SuffStats::default();
        for k in 1..x.len() {
            s.update(x[k - 1], x[k], y[k]);
        }
        s
    }

    /// Concatenation with the transitions of a following segment.
    pub fn merge(&self, tail: &SuffStats) -> SuffStats {
        SuffStats {
            lag: self.lag + tail.lag,
            prev_sq: self.prev_sq + tail.prev_sq,
            cur_sq: self.cur_sq + tail.cur_sq,
            diff_sq: self.diff_sq + tail.diff_sq,
            resid_sq: self.resid_sq + tail.resid_sq,
            x0_sq: self.x0_sq,
            count: self.count + tail.count,
        }
    }

    /// `sum_{k=1}^n (x_k - rho x_{k-1})^2`.
    pub fn trans_residual(&self, rho: f64) -> f64 {
        if rho == 1.0 {
            self.diff_sq
        } else {
            (self.cur_sq - 2.0 * rho * self.lag + rho * rho * self.prev_sq).max(0.0)
        }
    }

    /// `(sum (x_k - x_{k-1})^2, sum (y_k - x_k)^2)`.
    pub fn ts(&self) -> [f64; 2] {
        [self.diff_sq, self.resid_sq]
    }

    /// `(sum x_{k-1} x_k, sum x_{k-1}^2, sum (y_k - x_k)^2)`.
    pub fn rs(&self) -> [f64; 3] {
        [self.lag, self.prev_sq, self.resid_sq]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_is_associative_with_concatenation() {
        let x = [0.3, -1.2, 0.8, 2.0, 1.1, -0.4];
        let y = [0.1, -0.9, 1.0, 1.7, 1.3, 0.0];
        let whole = SuffStats::from_path(&x, &y);
        for m in 0..x.len() {
            let head = SuffStats::from_path(&x[..=m], &y[..=m]);
            let tail = SuffStats::transitions(&x[m..], &y[m..]);
            let merged = head.merge(&tail);
            assert_eq!(merged.count, whole.count);
            for (a, b) in [
                (merged.lag, whole.lag),
                (merged.prev_sq, whole.prev_sq),
                (merged.diff_sq, whole.diff_sq),
                (merged.resid_sq, whole.resid_sq),
            ] {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn residual_at_unit_rho_matches_differences() {
        let x = [0.3, -1.2, 0.8];
        let s = SuffStats::from_path(&x, &[0.0; 3]);
        let direct = (-1.5f64).powi(2) + 2.0f64.powi(2);
        assert!((s.trans_residual(1.0) - direct).abs() < 1e-12);
        assert!((s.cur_sq - 2.0 * s.lag + s.prev_sq - direct).abs() < 1e-12);
    }
}
