//! Unconstrained coordinates `u = (atanh rho, ln tau2, ln sigma2)`.

use crate::model::Theta;

const RHO_EDGE: f64 = 1.0 - 1e-12;

pub fn to_unconstrained(theta: &Theta) -> [f64; 3] {
    [theta.rho.clamp(-RHO_EDGE, RHO_EDGE).atanh(), theta.tau2.ln(), theta.sigma2.ln()]
}

/// Maps back; only the free components of `base` are replaced.
pub fn from_unconstrained(u: &[f64; 3], base: &Theta) -> Theta {
    let mut t = *base;
    if base.free.rho {
        t.rho = u[0].tanh().clamp(-RHO_EDGE, RHO_EDGE);
    }
    if base.free.tau2 {
        t.tau2 = u[1].exp();
    }
    if base.free.sigma2 {
        t.sigma2 = u[2].exp();
    }
    t
}

/// `d theta / d u` (diagonal).
pub fn jacobian(theta: &Theta) -> [f64; 3] {
    [1.0 - theta.rho * theta.rho, theta.tau2, theta.sigma2]
}

/// `log |d theta / d u|` over the free components.
pub fn log_jacobian(theta: &Theta) -> f64 {
    let j = jacobian(theta);
    theta.free.free_params().into_iter().map(|p| j[p.index()].ln()).sum()
}

/// Chain rule: gradient in `u` from a gradient in `theta`, zero on fixed components.
pub fn to_unconstrained_gradient(theta: &Theta, grad: &[f64; 3]) -> [f64; 3] {
    let j = jacobian(theta);
    let mut g = [0.0; 3];
    for p in theta.free.free_params() {
        let k = p.index();
        g[k] = grad[k] * j[k];
    }
    g
}
