//! Exact filtering, smoothing and likelihood for the scalar linear-Gaussian
//! model. These are the reference values every particle estimator is checked
//! against.

use crate::error::{Error, Result};
use crate::ml::lambda::{lambda_map, InitialTerm};
use crate::model::{check_observations, normal_logpdf, InitialLaw, Theta};
use crate::smooth::functional::{AdditiveFunctional, QuadraticFunctional, INIT_BASIS, TRANS_BASIS};

pub mod grid;

/// Filtered moments after assimilating some prefix of the observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanState {
    pub mean: f64,
    pub var: f64,
    /// Number of observations assimilated so far.
    pub steps: usize,
}

impl KalmanState {
    /// Assimilates one observation; returns `log p(y_n | y_{0:n-1})`.
    pub fn update(&mut self, theta: &Theta, init: InitialLaw, y: f64) -> Result<f64> {
        let (pm, pv) = if self.steps == 0 {
            init.moments(theta)?
        } else {
            (theta.rho * self.mean, theta.rho * theta.rho * self.var + theta.tau2)
        };
        let s = pv + theta.sigma2;
        let ll = normal_logpdf(y, pm, s);
        let k = pv / s;
        self.mean = pm + k * (y - pm);
        self.var = pv * theta.sigma2 / s;
        self.steps += 1;
        Ok(ll)
    }

    pub fn new() -> Self {
        KalmanState { mean: 0.0, var: 0.0, steps: 0 }
    }
}

impl Default for KalmanState {
    fn default() -> Self {
        KalmanState::new()
    }
}

/// Exact filtering and (optionally) smoothing moments.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanResult {
    pub theta: Theta,
    pub init: InitialLaw,
    pub pred_mean: Vec<f64>,
    pub pred_var: Vec<f64>,
    pub filt_mean: Vec<f64>,
    pub filt_var: Vec<f64>,
    pub loglik_increments: Vec<f64>,
    /// Empty until [`rts_smoother`] runs.
    pub smooth_mean: Vec<f64>,
    pub smooth_var: Vec<f64>,
    /// `lag1_cov[n] = Cov(x_n, x_{n+1} | y_{0:T})`, length `T`.
    pub lag1_cov: Vec<f64>,
}

impl KalmanResult {
    pub fn loglik(&self) -> f64 {
        self.loglik_increments.iter().sum()
    }

    pub fn horizon(&self) -> usize {
        self.filt_mean.len() - 1
    }

    pub fn is_smoothed(&self) -> bool {
        !self.smooth_mean.is_empty()
    }
}

/// Forward Kalman pass.
pub fn kalman_filter(theta: &Theta, init: InitialLaw, y: &[f64]) -> Result<KalmanResult> {
    check_observations(y)?;
    theta.validate()?;
    let n = y.len();
    let mut out = KalmanResult {
        theta: *theta,
        init,
        pred_mean: Vec::with_capacity(n),
        pred_var: Vec::with_capacity(n),
        filt_mean: Vec::with_capacity(n),
        filt_var: Vec::with_capacity(n),
        loglik_increments: Vec::with_capacity(n),
        smooth_mean: Vec::new(),
        smooth_var: Vec::new(),
        lag1_cov: Vec::new(),
    };
    let mut state = KalmanState::new();
    for &yn in y {
        let (pm, pv) = if state.steps == 0 {
            init.moments(theta)?
        } else {
            (theta.rho * state.mean, theta.rho * theta.rho * state.var + theta.tau2)
        };
        out.pred_mean.push(pm);
        out.pred_var.push(pv);
        out.loglik_increments.push(state.update(theta, init, yn)?);
        out.filt_mean.push(state.mean);
        out.filt_var.push(state.var);
    }
    Ok(out)
}

/// Exact `log p_theta(y_{0:T})` without storing moments.
pub fn kalman_loglik(theta: &Theta, init: InitialLaw, y: &[f64]) -> Result<f64> {
    check_observations(y)?;
    theta.validate()?;
    let mut state = KalmanState::new();
    let mut total = 0.0;
    for &yn in y {
        total += state.update(theta, init, yn)?;
    }
    Ok(total)
}

/// Rauch-Tung-Striebel backward pass, including lag-one cross-covariances.
pub fn rts_smoother(filter: &KalmanResult) -> KalmanResult {
    let mut out = filter.clone();
    let n = filter.filt_mean.len();
    let rho = filter.theta.rho;
    let mut sm = vec![0.0; n];
    let mut sv = vec![0.0; n];
    let mut lag = vec![0.0; n.saturating_sub(1)];
    sm[n - 1] = filter.filt_mean[n - 1];
    sv[n - 1] = filter.filt_var[n - 1];
    for k in (0..n - 1).rev() {
        let j = filter.filt_var[k] * rho / filter.pred_var[k + 1];
        sm[k] = filter.filt_mean[k] + j * (sm[k + 1] - filter.pred_mean[k + 1]);
        sv[k] = filter.filt_var[k] + j * j * (sv[k + 1] - filter.pred_var[k + 1]);
        lag[k] = j * sv[k + 1];
    }
    out.smooth_mean = sm;
    out.smooth_var = sv;
    out.lag1_cov = lag;
    out
}

/// Filter followed by smoother.
pub fn kalman_smoother(theta: &Theta, init: InitialLaw, y: &[f64]) -> Result<KalmanResult> {
    Ok(rts_smoother(&kalman_filter(theta, init, y)?))
}

/// Exact smoothed expectation of a quadratic additive functional over `y_{0:T}`.
pub fn exact_additive<S: AdditiveFunctional + ?Sized>(
    theta: &Theta,
    init: InitialLaw,
    y: &[f64],
    s: &S,
) -> Result<Vec<f64>> {
    let q = s.quadratic().ok_or(Error::UnsupportedFunctional)?;
    let sm = kalman_smoother(theta, init, y)?;
    Ok(additive_from_smoothed(&sm, y, q))
}

pub(crate) fn additive_from_smoothed(sm: &KalmanResult, y: &[f64], q: &QuadraticFunctional) -> Vec<f64> {
    let dim = q.trans.len();
    let mut total = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let m = &sm.smooth_mean;
    let v = &sm.smooth_var;
    let second = |k: usize| v[k] + m[k] * m[k];
    let resid = |k: usize| (y[k] - m[k]) * (y[k] - m[k]) + v[k];
    if q.init.is_some() {
        let mom: [f64; INIT_BASIS] = [1.0, m[0], second(0), resid(0)];
        q.expect_init(&mom, &mut buf);
        total.iter_mut().zip(&buf).for_each(|(t, b)| *t += b);
    }
    for k in 1..m.len() {
        let mom: [f64; TRANS_BASIS] =
            [1.0, m[k - 1], m[k], second(k - 1), sm.lag1_cov[k - 1] + m[k - 1] * m[k], second(k), resid(k)];
        q.expect_trans(&mom, &mut buf);
        total.iter_mut().zip(&buf).for_each(|(t, b)| *t += b);
    }
    total
}

/// Exact `S_n` computed on the prefix `y_{0:n}` for each requested `n`.
pub fn exact_additive_trace<S: AdditiveFunctional + ?Sized>(
    theta: &Theta,
    init: InitialLaw,
    y: &[f64],
    s: &S,
    times: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let q = s.quadratic().ok_or(Error::UnsupportedFunctional)?;
    let filt = kalman_filter(theta, init, y)?;
    let mut out = Vec::with_capacity(times.len());
    for &n in times {
        if n >= y.len() {
            return Err(Error::InvalidParameter(format!("time {n} beyond horizon {}", y.len() - 1)));
        }
        let prefix = truncate(&filt, n);
        out.push(additive_from_smoothed(&rts_smoother(&prefix), &y[..=n], q));
    }
    Ok(out)
}

fn truncate(filter: &KalmanResult, n: usize) -> KalmanResult {
    KalmanResult {
        theta: filter.theta,
        init: filter.init,
        pred_mean: filter.pred_mean[..=n].to_vec(),
        pred_var: filter.pred_var[..=n].to_vec(),
        filt_mean: filter.filt_mean[..=n].to_vec(),
        filt_var: filter.filt_var[..=n].to_vec(),
        loglik_increments: filter.loglik_increments[..=n].to_vec(),
        smooth_mean: Vec::new(),
        smooth_var: Vec::new(),
        lag1_cov: Vec::new(),
    }
}

/// Exact score `grad_theta log p_theta(y_{0:T})` in `(rho, tau2, sigma2)`
/// order, via Fisher's identity. All three components are reported
/// regardless of the free mask.
pub fn exact_score(theta: &Theta, init: InitialLaw, y: &[f64]) -> Result<[f64; 3]> {
    let s = exact_additive(theta, init, y, &QuadraticFunctional::score(theta, init))?;
    Ok([s[0], s[1], s[2]])
}

/// One exact EM iteration.
pub fn exact_em_step(theta: &Theta, init: InitialLaw, y: &[f64]) -> Result<Theta> {
    let stats = exact_additive(theta, init, y, &QuadraticFunctional::em_statistic())?;
    let horizon = y.len() - 1;
    if horizon == 0 {
        return Err(Error::InvalidParameter("EM needs at least two observations".into()));
    }
    let z: Vec<f64> = stats.iter().map(|v| v / horizon as f64).collect();
    let m = lambda_map(&z, horizon, theta, InitialTerm::from_law(init))?;
    Ok(m.to_theta(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::simulate_lgssm;

    #[test]
    fn single_observation_marginal() {
        let th = Theta::new(0.6, 0.5, 0.3).unwrap();
        let r = kalman_filter(&th, InitialLaw::Stationary, &[0.4]).unwrap();
        let v = 0.5 / (1.0 - 0.36) + 0.3;
        assert!((r.loglik() - normal_logpdf(0.4, 0.0, v)).abs() < 1e-14);
    }

    #[test]
    fn degenerate_state_gives_white_noise_likelihood() {
        let th = Theta::new(0.0, 1e-12, 0.8).unwrap();
        let y = [0.3, -1.2, 0.5, 2.0];
        let r = kalman_loglik(&th, InitialLaw::Stationary, &y).unwrap();
        let e: f64 = y.iter().map(|v| normal_logpdf(*v, 0.0, 0.8)).sum();
        assert!((r - e).abs() < 1e-6);
    }

    #[test]
    fn non_finite_observation_is_rejected() {
        let th = Theta::new(0.5, 1.0, 1.0).unwrap();
        let e = kalman_filter(&th, InitialLaw::Stationary, &[0.0, f64::NAN, 1.0]).unwrap_err();
        assert_eq!(e, Error::NonFiniteObservation { index: 1 });
    }

    #[test]
    fn smoother_boundary_and_variance_reduction() {
        let th = Theta::new(0.8, 0.1, 1.0).unwrap();
        let tr = simulate_lgssm(&th, InitialLaw::Stationary, 50, 4).unwrap();
        let s = kalman_smoother(&th, InitialLaw::Stationary, &tr.observations).unwrap();
        let t = s.horizon();
        assert_eq!(s.smooth_mean[t], s.filt_mean[t]);
        assert_eq!(s.smooth_var[t], s.filt_var[t]);
        for k in 0..=t {
            assert!(s.smooth_var[k] <= s.filt_var[k] + 1e-15);
            assert!(s.smooth_var[k] > 0.0);
        }
    }

    #[test]
    fn split_sequences_chain() {
        let th = Theta::new(0.7, 0.4, 0.9).unwrap();
        let tr = simulate_lgssm(&th, InitialLaw::Stationary, 99, 8).unwrap();
        let y = &tr.observations;
        let whole = kalman_loglik(&th, InitialLaw::Stationary, y).unwrap();
        let mut st = KalmanState::new();
        let mut a = 0.0;
        for v in &y[..37] {
            a += st.update(&th, InitialLaw::Stationary, *v).unwrap();
        }
        let mut b = 0.0;
        for v in &y[37..] {
            b += st.update(&th, InitialLaw::Stationary, *v).unwrap();
        }
        assert!((a + b - whole).abs() < 1e-12);
    }

    #[test]
    fn zero_functional_is_zero() {
        let th = Theta::new(0.7, 0.4, 0.9).unwrap();
        let tr = simulate_lgssm(&th, InitialLaw::Stationary, 20, 8).unwrap();
        let s = exact_additive(&th, InitialLaw::Stationary, &tr.observations, &QuadraticFunctional::zero(2)).unwrap();
        assert_eq!(s, vec![0.0, 0.0]);
    }

    #[test]
    fn uninformative_data_gives_prior_moments() {
        let th = Theta::new(0.5, 1.0, 1e8).unwrap();
        let tr = simulate_lgssm(&Theta::new(0.5, 1.0, 1.0).unwrap(), InitialLaw::Stationary, 30, 2).unwrap();
        let s = exact_additive(&th, InitialLaw::Stationary, &tr.observations, &QuadraticFunctional::second_moment())
            .unwrap();
        let prior = 31.0 * (1.0 / 0.75);
        assert!(((s[0] - prior) / prior).abs() < 1e-3, "{} vs {prior}", s[0]);
    }

    #[test]
    fn fixed_initial_law_allows_unit_rho() {
        let th = Theta::new(1.0, 1.0, 1.0).unwrap();
        let law = InitialLaw::Fixed { mean: 0.0, var: 1.0 };
        let tr = simulate_lgssm(&th, law, 40, 3).unwrap();
        let r = kalman_smoother(&th, law, &tr.observations).unwrap();
        assert!(r.loglik().is_finite());
        assert!(kalman_filter(&th, InitialLaw::Stationary, &tr.observations).is_err());
    }
}
