//! Step-size sequences for stochastic approximation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `gamma_n = scale * n^(-exponent)` with `exponent` in `(0.5, 1]`.
    Power { scale: f64, exponent: f64 },
    /// Constant step; only meaningful for tests and degenerate checks.
    Constant(f64),
}

impl StepSize {
    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        let s = StepSize::Power { scale, exponent };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSize::Power { scale, exponent } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::InvalidParameter(format!("step scale {scale} must be > 0")));
                }
                if !(exponent > 0.5 && exponent <= 1.0) {
                    return Err(Error::InvalidParameter(format!("step exponent {exponent} outside (0.5, 1]")));
                }
                Ok(())
            }
            StepSize::Constant(g) => {
                if g.is_finite() && g >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("constant step {g} must be finite and >= 0")))
                }
            }
        }
    }

    /// `gamma_n` for `n >= 1`.
    pub fn gamma(&self, n: usize) -> f64 {
        match *self {
            StepSize::Power { scale, exponent } => scale * (n.max(1) as f64).powf(-exponent),
            StepSize::Constant(g) => g,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_schedule_values() {
        let s = StepSize::power(1.0, 0.8).unwrap();
        assert_eq!(s.gamma(1), 1.0);
        assert!((s.gamma(32) - 32f64.powf(-0.8)).abs() < 1e-15);
        assert!(StepSize::power(1.0, 0.5).is_err());
        assert!(StepSize::power(1.0, 1.2).is_err());
    }
}
