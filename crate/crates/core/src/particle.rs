//! Weight bookkeeping, effective sample size and resampling.

use rand::Rng;

use crate::error::{Error, Result};

/// Weighted particle population at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    pub time_index: usize,
    pub positions: Vec<f64>,
    /// Unnormalised log weights whose softmax is `norm_weights`.
    pub log_weights: Vec<f64>,
    pub norm_weights: Vec<f64>,
    /// Index into the previous system of each particle's parent (identity at time 0).
    pub ancestors: Vec<usize>,
    /// Whether the ancestors were drawn by resampling at this step.
    pub resampled: bool,
}

impl ParticleSystem {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `sum_i W^i phi(X^i)`.
    pub fn expectation(&self, phi: impl Fn(f64) -> f64) -> f64 {
        self.positions.iter().zip(&self.norm_weights).map(|(&x, &w)| w * phi(x)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expectation(|x| (x - m) * (x - m))
    }

    pub fn ess(&self) -> f64 {
        ess(&self.norm_weights)
    }
}

/// `log sum_i exp(v_i)`; `-inf` when every entry is `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Normalised weights and `log((1/N) sum_i exp(logw_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub weights: Vec<f64>,
    pub log_mean_weight: f64,
}

/// Shift-invariant softmax of `logw`.
///
/// `time` is only used to label a collapse error.
pub fn normalize_log_weights(logw: &[f64], time: usize) -> Result<Normalized> {
    let mut weights = Vec::with_capacity(logw.len());
    let log_mean_weight = normalize_into(logw, &mut weights, time)?;
    Ok(Normalized { weights, log_mean_weight })
}

pub(crate) fn normalize_into(logw: &[f64], out: &mut Vec<f64>, time: usize) -> Result<f64> {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > f64::NEG_INFINITY) || max.is_nan() || max == f64::INFINITY {
        return Err(Error::ParticleCollapse { time });
    }
    out.clear();
    let mut total = 0.0;
    for &lw in logw {
        let w = if lw.is_nan() { 0.0 } else { (lw - max).exp() };
        total += w;
        out.push(w);
    }
    let inv = 1.0 / total;
    for w in out.iter_mut() {
        *w *= inv;
    }
    Ok(max + total.ln() - (logw.len() as f64).ln())
}

/// Effective sample size `1 / sum_i W_i^2`.
pub fn ess(norm_weights: &[f64]) -> f64 {
    1.0 / norm_weights.iter().map(|w| w * w).sum::<f64>()
}

/// Resampling scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResamplingScheme {
    #[default]
    Multinomial,
    Systematic,
}

/// Draws `n_out` ancestor indices from `norm_weights`.
///
/// Both schemes invert the cumulative weights; a uniform `u` maps to the
/// lowest index `i` with `cum_i > u`.
pub fn resample<R: Rng + ?Sized>(
    norm_weights: &[f64],
    n_out: usize,
    scheme: ResamplingScheme,
    rng: &mut R,
) -> Vec<usize> {
    let mut out = Vec::with_capacity(n_out);
    resample_into(norm_weights, n_out, scheme, rng, &mut out);
    out
}

pub(crate) fn resample_into<R: Rng + ?Sized>(
    norm_weights: &[f64],
    n_out: usize,
    scheme: ResamplingScheme,
    rng: &mut R,
    out: &mut Vec<usize>,
) {
    out.clear();
    if n_out == 0 {
        return;
    }
    let last_positive = norm_weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    let total: f64 = norm_weights.iter().sum();
    match scheme {
        ResamplingScheme::Multinomial => {
            // Sorted uniforms via normalised exponential spacings.
            let mut spacings = Vec::with_capacity(n_out + 1);
            let mut acc = 0.0;
            for _ in 0..=n_out {
                let e = -(1.0 - rng.random::<f64>()).ln();
                acc += e;
                spacings.push(acc);
            }
            let scale = total / acc;
            let mut i = 0;
            let mut cum = norm_weights[0];
            for &s in spacings.iter().take(n_out) {
                let u = s * scale;
                while u >= cum && i < last_positive {
                    i += 1;
                    cum += norm_weights[i];
                }
                out.push(i);
            }
        }
        ResamplingScheme::Systematic => {
            let u0: f64 = rng.random();
            let step = total / n_out as f64;
            let mut i = 0;
            let mut cum = norm_weights[0];
            for k in 0..n_out {
                let u = (k as f64 + u0) * step;
                while u >= cum && i < last_positive {
                    i += 1;
                    cum += norm_weights[i];
                }
                out.push(i);
            }
        }
    }
}

/// Inverse-cdf sampler for repeated categorical draws from fixed weights.
#[derive(Debug, Clone)]
pub struct Categorical {
    cdf: Vec<f64>,
}

impl Categorical {
    pub fn new(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Categorical { cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().unwrap();
        let u = rng.random::<f64>() * total;
        let i = self.cdf.partition_point(|&c| c <= u);
        i.min(self.cdf.len() - 1)
    }
}

/// Offspring counts of each index in `ancestors`.
pub fn offspring_counts(ancestors: &[usize], n: usize) -> Vec<usize> {
    let mut counts = vec![0; n];
    for &a in ancestors {
        counts[a] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::from_seed;

    #[test]
    fn normalize_examples() {
        let n = normalize_log_weights(&[0.0, 0.0], 0).unwrap();
        assert_eq!(n.weights, vec![0.5, 0.5]);
        assert!(n.log_mean_weight.abs() < 1e-15);

        let c = 1e6;
        let hi = c + 3f64.ln();
        let n = normalize_log_weights(&[c, hi], 0).unwrap();
        // The shift is exact for the representable offset `hi - c`.
        let e0 = 1.0 / (1.0 + (hi - c).exp());
        assert!((n.weights[0] - e0).abs() < 1e-15);
        assert!((n.weights[0] - 0.25).abs() < 1e-9);
        assert!((n.weights[1] - 0.75).abs() < 1e-9);

        let n = normalize_log_weights(&[0.0, 2f64.ln(), 5f64.ln()], 0).unwrap();
        for (w, e) in n.weights.iter().zip([0.125, 0.25, 0.625]) {
            assert!((w - e).abs() < 1e-15);
        }
        assert!((n.log_mean_weight - (8.0f64 / 3.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn collapse_is_reported_with_time() {
        let e = normalize_log_weights(&[f64::NEG_INFINITY; 3], 17).unwrap_err();
        assert_eq!(e, Error::ParticleCollapse { time: 17 });
    }

    #[test]
    fn ess_examples() {
        assert!((ess(&vec![0.01; 100]) - 100.0).abs() < 1e-9);
        assert_eq!(ess(&[1.0, 0.0, 0.0]), 1.0);
        assert!((ess(&[0.5, 0.25, 0.25]) - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn point_mass_resamples_to_single_index() {
        let mut rng = from_seed(1);
        for scheme in [ResamplingScheme::Multinomial, ResamplingScheme::Systematic] {
            let a = resample(&[1.0, 0.0, 0.0], 50, scheme, &mut rng);
            assert!(a.iter().all(|&i| i == 0));
            let a = resample(&[0.0, 0.0, 1.0], 50, scheme, &mut rng);
            assert!(a.iter().all(|&i| i == 2));
        }
    }

    #[test]
    fn systematic_uniform_is_a_permutation() {
        let mut rng = from_seed(2);
        for _ in 0..100 {
            let a = resample(&[0.2; 5], 5, ResamplingScheme::Systematic, &mut rng);
            assert_eq!(a, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn multinomial_binomial_moment() {
        let mut rng = from_seed(3);
        let reps = 100_000;
        let mut total = 0usize;
        for _ in 0..reps {
            let a = resample(&[0.7, 0.3], 10, ResamplingScheme::Multinomial, &mut rng);
            total += a.iter().filter(|&&i| i == 0).count();
        }
        let mean = total as f64 / reps as f64;
        let se = (10.0 * 0.7 * 0.3 / reps as f64).sqrt();
        assert!((mean - 7.0).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn categorical_respects_zero_weights() {
        let c = Categorical::new(&[0.0, 0.5, 0.0, 0.5]);
        let mut rng = from_seed(4);
        for _ in 0..1000 {
            let i = c.sample(&mut rng);
            assert!(i == 1 || i == 3);
        }
    }
}
