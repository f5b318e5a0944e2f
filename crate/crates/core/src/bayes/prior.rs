//! Priors on `(rho, tau2, sigma2)`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::model::{Param, Theta};

/// `rho ~ U[-1, 1]`, `tau2 ~ IG(a, b)`, `sigma2 ~ IG(c, d)` (shape, scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec { a: 1.0, b: 1.0, c: 1.0, d: 1.0 }
    }
}

/// `log IG(x; shape, scale)`.
pub fn inv_gamma_logpdf(x: f64, shape: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    shape * scale.ln() - ln_gamma(shape) - (shape + 1.0) * x.ln() - scale / x
}

/// Draw from `IG(shape, scale)` as `scale / Gamma(shape, 1)`.
pub fn inv_gamma_sample<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    let g = Gamma::new(shape, 1.0).expect("positive shape").sample(rng);
    scale / g
}

impl PriorSpec {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = PriorSpec { a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("prior {name} = {v} must be > 0")));
            }
        }
        Ok(())
    }

    /// Marginal log prior density of one component.
    pub fn logpdf_param(&self, p: Param, v: f64) -> f64 {
        match p {
            Param::Rho => {
                if v.abs() <= 1.0 {
                    -std::f64::consts::LN_2
                } else {
                    f64::NEG_INFINITY
                }
            }
            Param::Tau2 => inv_gamma_logpdf(v, self.a, self.b),
            Param::Sigma2 => inv_gamma_logpdf(v, self.c, self.d),
        }
    }

    /// Log prior density of the free components of `theta`.
    pub fn logpdf(&self, theta: &Theta) -> f64 {
        theta.free.free_params().into_iter().map(|p| self.logpdf_param(p, theta.get(p))).sum()
    }

    pub fn sample_param<R: Rng + ?Sized>(&self, p: Param, rng: &mut R) -> f64 {
        match p {
            Param::Rho => rng.random_range(-1.0..=1.0),
            Param::Tau2 => inv_gamma_sample(self.a, self.b, rng),
            Param::Sigma2 => inv_gamma_sample(self.c, self.d, rng),
        }
    }

    /// Draws the free components; fixed components are taken from `base`.
    pub fn sample<R: Rng + ?Sized>(&self, base: &Theta, rng: &mut R) -> Theta {
        let mut t = *base;
        for p in base.free.free_params() {
            t.set(p, self.sample_param(p, rng));
        }
        t
    }

    /// Whether `v` lies in the support of the prior on `p`.
    pub fn in_support(&self, p: Param, v: f64) -> bool {
        match p {
            Param::Rho => v.abs() <= 1.0,
            Param::Tau2 | Param::Sigma2 => v > 0.0 && v.is_finite(),
        }
    }
}
