//! Additive functionals `S_n = E[ s_0(x_0) + sum_{k=1}^n s_k(x_{k-1}, x_k) | y_{0:n} ]`.

use crate::model::{InitialLaw, Theta};

/// A vector-valued additive statistic.
pub trait AdditiveFunctional {
    fn dim(&self) -> usize;

    /// Whether a `k = 0` term `s_0(x_0)` exists.
    fn has_initial_term(&self) -> bool {
        false
    }

    /// Writes `s_0(x_0)` (with observation `y_0`) into `out`.
    fn initial(&self, _x0: f64, _y0: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Writes `s_k(x_{k-1}, x_k)` (with observation `y_k`) into `out`.
    fn eval(&self, k: usize, x_prev: f64, x: f64, y: f64, out: &mut [f64]);

    /// The quadratic form of this functional, when it has one. Smoothers use
    /// it to replace per-pair evaluation by backward moments, and the Kalman
    /// oracle uses it for exact expectations.
    fn quadratic(&self) -> Option<&QuadraticFunctional> {
        None
    }
}

/// Number of transition basis terms: `1, x', x, x'^2, x'x, x^2, (y-x)^2`
/// where `x'` is the previous state.
pub const TRANS_BASIS: usize = 7;
/// Number of initial basis terms: `1, x0, x0^2, (y0-x0)^2`.
pub const INIT_BASIS: usize = 4;

#[inline]
pub(crate) fn trans_basis(x_prev: f64, x: f64, y: f64) -> [f64; TRANS_BASIS] {
    let r = y - x;
    [1.0, x_prev, x, x_prev * x_prev, x_prev * x, x * x, r * r]
}

#[inline]
pub(crate) fn init_basis(x0: f64, y0: f64) -> [f64; INIT_BASIS] {
    let r = y0 - x0;
    [1.0, x0, x0 * x0, r * r]
}

/// Statistic whose components are linear combinations of quadratic monomials
/// of `(x_{k-1}, x_k)` and the squared observation residual.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFunctional {
    pub trans: Vec<[f64; TRANS_BASIS]>,
    pub init: Option<Vec<[f64; INIT_BASIS]>>,
}

impl QuadraticFunctional {
    pub fn zero(dim: usize) -> Self {
        QuadraticFunctional { trans: vec![[0.0; TRANS_BASIS]; dim], init: None }
    }

    /// `s_k = x_{k-1} x_k`.
    pub fn lag_product() -> Self {
        QuadraticFunctional { trans: vec![[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]], init: None }
    }

    /// `s_k = x_k^2`, with `s_0 = x_0^2`.
    pub fn second_moment() -> Self {
        QuadraticFunctional { trans: vec![[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]], init: Some(vec![[0.0, 0.0, 1.0, 0.0]]) }
    }

    /// Sum of the states, `s_k = x_k` with `s_0 = x_0`.
    pub fn state_sum() -> Self {
        QuadraticFunctional { trans: vec![[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]], init: Some(vec![[0.0, 1.0, 0.0, 0.0]]) }
    }

    /// The EM statistic `((y_k - x_k)^2, x_{k-1}^2, x_{k-1} x_k, x_k^2, x_0^2)`.
    ///
    /// The `k = 0` term contributes `(y_0 - x_0)^2` to the first component
    /// and `x_0^2` to the fifth; the fifth component is only needed by the
    /// M-step under the stationary initial law.
    pub fn em_statistic() -> Self {
        QuadraticFunctional {
            trans: vec![
                [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
                [0.0; TRANS_BASIS],
            ],
            init: Some(vec![
                [0.0, 0.0, 0.0, 1.0],
                [0.0; INIT_BASIS],
                [0.0; INIT_BASIS],
                [0.0; INIT_BASIS],
                [0.0, 0.0, 1.0, 0.0],
            ]),
        }
    }

    /// Complete-data score `d/d(rho, tau2, sigma2) log p_theta(x_{0:n}, y_{0:n})`
    /// as an additive functional (Fisher's identity). The initial term carries
    /// `grad log mu_theta + grad log g_theta(y_0 | x_0)`.
    pub fn score(theta: &Theta, init: InitialLaw) -> Self {
        let (rho, t2, s2) = (theta.rho, theta.tau2, theta.sigma2);
        let t4 = t2 * t2;
        let s4 = s2 * s2;
        let d_rho = [0.0, 0.0, 0.0, -rho / t2, 1.0 / t2, 0.0, 0.0];
        let d_tau2 = [-0.5 / t2, 0.0, 0.0, 0.5 * rho * rho / t4, -rho / t4, 0.5 / t4, 0.0];
        let d_sigma2 = [-0.5 / s2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5 / s4];
        let obs0 = [-0.5 / s2, 0.0, 0.0, 0.5 / s4];
        let (i_rho, i_tau2) = match init {
            InitialLaw::Stationary => {
                let one_m = 1.0 - rho * rho;
                ([-rho / one_m, 0.0, rho / t2, 0.0], [-0.5 / t2, 0.0, 0.5 * one_m / t4, 0.0])
            }
            InitialLaw::Fixed { .. } => ([0.0; INIT_BASIS], [0.0; INIT_BASIS]),
        };
        QuadraticFunctional { trans: vec![d_rho, d_tau2, d_sigma2], init: Some(vec![i_rho, i_tau2, obs0]) }
    }

    #[inline]
    pub fn eval_trans_into(&self, x_prev: f64, x: f64, y: f64, out: &mut [f64]) {
        let b = trans_basis(x_prev, x, y);
        for (o, c) in out.iter_mut().zip(&self.trans) {
            *o = dot7(c, &b);
        }
    }

    /// `sum_i W_i s(x'_i, x, y)` given backward moments
    /// `(sum W, sum W x', sum W x'^2)` of the previous state.
    #[inline]
    pub fn eval_backward_moments(&self, m0: f64, m1: f64, m2: f64, x: f64, y: f64, out: &mut [f64]) {
        let r = y - x;
        let b = [m0, m1, m0 * x, m2, m1 * x, m0 * x * x, m0 * r * r];
        for (o, c) in out.iter_mut().zip(&self.trans) {
            *o = dot7(c, &b);
        }
    }

    /// Expectation of a transition term from the moments
    /// `E x', E x, E x'^2, E x'x, E x^2, E (y-x)^2`.
    pub fn expect_trans(&self, moments: &[f64; TRANS_BASIS], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.trans) {
            *o = dot7(c, moments);
        }
    }

    pub fn expect_init(&self, moments: &[f64; INIT_BASIS], out: &mut [f64]) {
        match &self.init {
            Some(init) => {
                for (o, c) in out.iter_mut().zip(init) {
                    *o = c.iter().zip(moments).map(|(a, b)| a * b).sum();
                }
            }
            None => out.iter_mut().for_each(|v| *v = 0.0),
        }
    }
}

#[inline]
fn dot7(a: &[f64; TRANS_BASIS], b: &[f64; TRANS_BASIS]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4] + a[5] * b[5] + a[6] * b[6]
}

impl AdditiveFunctional for QuadraticFunctional {
    fn dim(&self) -> usize {
        self.trans.len()
    }

    fn has_initial_term(&self) -> bool {
        self.init.is_some()
    }

    fn initial(&self, x0: f64, y0: f64, out: &mut [f64]) {
        let b = init_basis(x0, y0);
        self.expect_init(&b, out);
    }

    fn eval(&self, _k: usize, x_prev: f64, x: f64, y: f64, out: &mut [f64]) {
        self.eval_trans_into(x_prev, x, y, out);
    }

    fn quadratic(&self) -> Option<&QuadraticFunctional> {
        Some(self)
    }
}

/// Wraps a closure as a (non-quadratic) functional.
pub struct FnFunctional<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(usize, f64, f64, f64, &mut [f64])> FnFunctional<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnFunctional { dim, f }
    }
}

impl<F: Fn(usize, f64, f64, f64, &mut [f64])> AdditiveFunctional for FnFunctional<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, k: usize, x_prev: f64, x: f64, y: f64, out: &mut [f64]) {
        (self.f)(k, x_prev, x, y, out)
    }
}

/// Hides the quadratic form of a functional, forcing per-pair evaluation.
pub struct Opaque<'a, S: ?Sized>(pub &'a S);

impl<S: AdditiveFunctional + ?Sized> AdditiveFunctional for Opaque<'_, S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn has_initial_term(&self) -> bool {
        self.0.has_initial_term()
    }
    fn initial(&self, x0: f64, y0: f64, out: &mut [f64]) {
        self.0.initial(x0, y0, out)
    }
    fn eval(&self, k: usize, x_prev: f64, x: f64, y: f64, out: &mut [f64]) {
        self.0.eval(k, x_prev, x, y, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{lg_densities, StateSpaceModel};

    #[test]
    fn score_matches_finite_differences_of_complete_log_density() {
        let theta = Theta::new(0.6, 0.4, 0.7).unwrap();
        let (x, y) = ([0.3, -0.8, 1.1], [0.1, -0.2, 0.9]);
        let logp = |t: &Theta| {
            let m = lg_densities(*t, InitialLaw::Stationary).unwrap();
            let mut s = m.init_logpdf(x[0]) + m.obs_logpdf(y[0], x[0]);
            for k in 1..3 {
                s += m.trans_logpdf(x[k], x[k - 1]) + m.obs_logpdf(y[k], x[k]);
            }
            s
        };
        let q = QuadraticFunctional::score(&theta, InitialLaw::Stationary);
        let mut total = [0.0; 3];
        let mut buf = [0.0; 3];
        q.initial(x[0], y[0], &mut buf);
        total.iter_mut().zip(&buf).for_each(|(t, b)| *t += b);
        for k in 1..3 {
            q.eval(k, x[k - 1], x[k], y[k], &mut buf);
            total.iter_mut().zip(&buf).for_each(|(t, b)| *t += b);
        }
        let h = 1e-6;
        for (i, p) in crate::model::Param::ALL.iter().enumerate() {
            let mut up = theta;
            let mut dn = theta;
            up.set(*p, theta.get(*p) + h);
            dn.set(*p, theta.get(*p) - h);
            let fd = (logp(&up) - logp(&dn)) / (2.0 * h);
            assert!((fd - total[i]).abs() < 1e-6, "{p:?}: fd {fd} vs {}", total[i]);
        }
    }

    #[test]
    fn backward_moments_match_pairwise_sum() {
        let q = QuadraticFunctional::em_statistic();
        let xs = [0.2, -1.0, 0.7];
        let ws = [0.5, 0.2, 0.3];
        let (x, y) = (0.4, 1.3);
        let mut direct = [0.0; 5];
        let mut buf = vec![0.0; 5];
        for (xp, w) in xs.iter().zip(&ws) {
            q.eval(1, *xp, x, y, &mut buf);
            direct.iter_mut().zip(&buf).for_each(|(d, b)| *d += w * b);
        }
        let m1: f64 = xs.iter().zip(&ws).map(|(a, w)| a * w).sum();
        let m2: f64 = xs.iter().zip(&ws).map(|(a, w)| a * a * w).sum();
        q.eval_backward_moments(1.0, m1, m2, x, y, &mut buf);
        for (a, b) in direct.iter().zip(&buf) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
