//! State-space model contract and the scalar linear-Gaussian model
//!
//! ```text
//! X_0 ~ mu_theta,   X_n = rho X_{n-1} + tau W_n,   Y_n = X_n + sigma V_n
//! ```
//!
//! with `W_n, V_n` i.i.d. standard normal. All densities are exposed in log
//! space.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::from_seed;

pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `log N(x; mean, var)`.
#[inline]
pub fn normal_logpdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + var.ln() + d * d / var)
}

/// One of the three static parameters of the linear-Gaussian model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Rho,
    Tau2,
    Sigma2,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::Rho, Param::Tau2, Param::Sigma2];

    pub fn index(self) -> usize {
        match self {
            Param::Rho => 0,
            Param::Tau2 => 1,
            Param::Sigma2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::Rho => "rho",
            Param::Tau2 => "tau2",
            Param::Sigma2 => "sigma2",
        }
    }
}

/// Which parameters an estimator is allowed to move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeMask {
    pub rho: bool,
    pub tau2: bool,
    pub sigma2: bool,
}

impl FreeMask {
    pub const ALL: FreeMask = FreeMask { rho: true, tau2: true, sigma2: true };
    pub const NONE: FreeMask = FreeMask { rho: false, tau2: false, sigma2: false };

    pub fn new(rho: bool, tau2: bool, sigma2: bool) -> Self {
        FreeMask { rho, tau2, sigma2 }
    }

    pub fn is_free(&self, p: Param) -> bool {
        match p {
            Param::Rho => self.rho,
            Param::Tau2 => self.tau2,
            Param::Sigma2 => self.sigma2,
        }
    }

    pub fn free_params(&self) -> Vec<Param> {
        Param::ALL.into_iter().filter(|p| self.is_free(*p)).collect()
    }

    pub fn count(&self) -> usize {
        self.free_params().len()
    }
}

impl Default for FreeMask {
    fn default() -> Self {
        FreeMask::ALL
    }
}

/// Parameter triple `(rho, tau2, sigma2)` with its free/fixed mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    pub rho: f64,
    pub tau2: f64,
    pub sigma2: f64,
    pub free: FreeMask,
}

impl Theta {
    pub fn new(rho: f64, tau2: f64, sigma2: f64) -> Result<Self> {
        let theta = Theta { rho, tau2, sigma2, free: FreeMask::ALL };
        theta.validate()?;
        Ok(theta)
    }

    /// Builds from standard deviations `(rho, tau, sigma)`.
    pub fn from_std(rho: f64, tau: f64, sigma: f64) -> Result<Self> {
        Theta::new(rho, tau * tau, sigma * sigma)
    }

    pub fn with_free(mut self, free: FreeMask) -> Self {
        self.free = free;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!("rho = {} outside [-1, 1]", self.rho)));
        }
        if !(self.tau2.is_finite() && self.tau2 > 0.0) {
            return Err(Error::InvalidParameter(format!("tau2 = {} must be > 0", self.tau2)));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma2 = {} must be > 0", self.sigma2)));
        }
        Ok(())
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Rho => self.rho,
            Param::Tau2 => self.tau2,
            Param::Sigma2 => self.sigma2,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        match p {
            Param::Rho => self.rho = value,
            Param::Tau2 => self.tau2 = value,
            Param::Sigma2 => self.sigma2 = value,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rho, self.tau2, self.sigma2]
    }

    /// Copies the free components of `update` into `self`; fixed components
    /// are left bit-identical.
    pub fn merge_free(&self, update: &Theta) -> Theta {
        let mut out = *self;
        for p in self.free.free_params() {
            out.set(p, update.get(p));
        }
        out
    }
}

/// Law of the initial state `X_0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitialLaw {
    /// `N(0, tau2 / (1 - rho^2))`; requires `|rho| < 1`.
    #[default]
    Stationary,
    /// `N(mean, var)`, independent of theta.
    Fixed { mean: f64, var: f64 },
}

impl InitialLaw {
    pub fn moments(&self, theta: &Theta) -> Result<(f64, f64)> {
        match *self {
            InitialLaw::Stationary => {
                if theta.rho.abs() >= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "stationary initial law undefined for |rho| = {}",
                        theta.rho.abs()
                    )));
                }
                Ok((0.0, theta.tau2 / (1.0 - theta.rho * theta.rho)))
            }
            InitialLaw::Fixed { mean, var } => {
                if !(var > 0.0 && var.is_finite() && mean.is_finite()) {
                    return Err(Error::InvalidParameter(format!("initial variance {var} must be > 0")));
                }
                Ok((mean, var))
            }
        }
    }

    pub fn depends_on_theta(&self) -> bool {
        matches!(self, InitialLaw::Stationary)
    }
}

/// Densities and proposals a particle algorithm needs from a model.
///
/// The proposal `q(x_n | y_n, x_{n-1})` must be absolutely continuous with
/// respect to the transition, and the predictive factor `q(y_n | x_{n-1})`
/// must be positive (it does not need to integrate to one). Defaults give the
/// bootstrap filter.
pub trait StateSpaceModel {
    fn init_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
    fn init_logpdf(&self, x0: f64) -> f64;
    fn trans_sample<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64;
    fn trans_logpdf(&self, x_new: f64, x: f64) -> f64;
    fn obs_logpdf(&self, y: f64, x: f64) -> f64;

    fn init_proposal_sample<R: Rng + ?Sized>(&self, _y0: f64, rng: &mut R) -> f64 {
        self.init_sample(rng)
    }
    fn init_proposal_logpdf(&self, x0: f64, _y0: f64) -> f64 {
        self.init_logpdf(x0)
    }
    fn proposal_sample<R: Rng + ?Sized>(&self, _y: f64, x: f64, rng: &mut R) -> f64 {
        self.trans_sample(x, rng)
    }
    fn proposal_logpdf(&self, x_new: f64, _y: f64, x: f64) -> f64 {
        self.trans_logpdf(x_new, x)
    }
    /// `log q(y_n | x_{n-1})`.
    fn predictive_logweight(&self, _y: f64, _x: f64) -> f64 {
        0.0
    }

    /// Short label of the proposal, echoed in filter output.
    fn proposal_name(&self) -> &'static str {
        "bootstrap"
    }

    /// `log C` with `f(x'|x) <= C` for all `x, x'`, when such a bound exists.
    fn trans_log_bound(&self) -> Option<f64> {
        None
    }

    /// `log w_0(x_0)`.
    fn initial_logweight(&self, y0: f64, x0: f64) -> f64 {
        self.obs_logpdf(y0, x0) + self.init_logpdf(x0) - self.init_proposal_logpdf(x0, y0)
    }

    /// `log w_n(x_{n-1:n})` for `n >= 1`.
    fn incremental_logweight(&self, y: f64, x_prev: f64, x: f64) -> f64 {
        self.obs_logpdf(y, x) + self.trans_logpdf(x, x_prev)
            - self.proposal_logpdf(x, y, x_prev)
            - self.predictive_logweight(y, x_prev)
    }
}

/// Proposal used by the particle filter for the linear-Gaussian model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProposalKind {
    /// Transition prior with unit predictive factor.
    #[default]
    Bootstrap,
    /// `p(x_n | y_n, x_{n-1})` with predictive factor `p(y_n | x_{n-1})`.
    Optimal,
}

/// The scalar linear-Gaussian state-space model.
#[derive(Debug, Clone, Copy)]
pub struct LinearGaussian {
    theta: Theta,
    init: InitialLaw,
    proposal: ProposalKind,
    init_mean: f64,
    init_var: f64,
    tau: f64,
    trans_lognorm: f64,
    obs_lognorm: f64,
    // Optimal-proposal constants.
    opt_var: f64,
    opt_sd: f64,
    opt_gain_x: f64,
    opt_gain_y: f64,
    pred_var: f64,
}

impl LinearGaussian {
    pub fn new(theta: Theta, init: InitialLaw, proposal: ProposalKind) -> Result<Self> {
        theta.validate()?;
        let (init_mean, init_var) = init.moments(&theta)?;
        let opt_var = 1.0 / (1.0 / theta.tau2 + 1.0 / theta.sigma2);
        Ok(LinearGaussian {
            theta,
            init,
            proposal,
            init_mean,
            init_var,
            tau: theta.tau2.sqrt(),
            trans_lognorm: -0.5 * (LN_2PI + theta.tau2.ln()),
            obs_lognorm: -0.5 * (LN_2PI + theta.sigma2.ln()),
            opt_var,
            opt_sd: opt_var.sqrt(),
            opt_gain_x: opt_var * theta.rho / theta.tau2,
            opt_gain_y: opt_var / theta.sigma2,
            pred_var: theta.tau2 + theta.sigma2,
        })
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn initial_law(&self) -> InitialLaw {
        self.init
    }

    pub fn proposal_kind(&self) -> ProposalKind {
        self.proposal
    }

    pub fn init_moments(&self) -> (f64, f64) {
        (self.init_mean, self.init_var)
    }

    /// Mean and variance of the locally optimal proposal `p(x' | y, x)`.
    pub fn optimal_moments(&self, y: f64, x: f64) -> (f64, f64) {
        (self.opt_gain_x * x + self.opt_gain_y * y, self.opt_var)
    }

    fn init_posterior(&self, y0: f64) -> (f64, f64) {
        let v = 1.0 / (1.0 / self.init_var + 1.0 / self.theta.sigma2);
        (v * (self.init_mean / self.init_var + y0 / self.theta.sigma2), v)
    }

    /// Same model with another parameter value.
    pub fn with_theta(&self, theta: Theta) -> Result<Self> {
        LinearGaussian::new(theta, self.init, self.proposal)
    }
}

/// Bootstrap densities for the linear-Gaussian model.
pub fn lg_densities(theta: Theta, init: InitialLaw) -> Result<LinearGaussian> {
    LinearGaussian::new(theta, init, ProposalKind::Bootstrap)
}

/// Linear-Gaussian model with the locally optimal proposal and predictive factor.
pub fn lg_optimal_proposal(theta: Theta, init: InitialLaw) -> Result<LinearGaussian> {
    LinearGaussian::new(theta, init, ProposalKind::Optimal)
}

impl StateSpaceModel for LinearGaussian {
    fn init_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.init_mean + self.init_var.sqrt() * z
    }

    fn init_logpdf(&self, x0: f64) -> f64 {
        normal_logpdf(x0, self.init_mean, self.init_var)
    }

    fn trans_sample<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.theta.rho * x + self.tau * z
    }

    #[inline]
    fn trans_logpdf(&self, x_new: f64, x: f64) -> f64 {
        let d = x_new - self.theta.rho * x;
        self.trans_lognorm - 0.5 * d * d / self.theta.tau2
    }

    #[inline]
    fn obs_logpdf(&self, y: f64, x: f64) -> f64 {
        let d = y - x;
        self.obs_lognorm - 0.5 * d * d / self.theta.sigma2
    }

    fn init_proposal_sample<R: Rng + ?Sized>(&self, y0: f64, rng: &mut R) -> f64 {
        match self.proposal {
            ProposalKind::Bootstrap => self.init_sample(rng),
            ProposalKind::Optimal => {
                let (m, v) = self.init_posterior(y0);
                let z: f64 = rng.sample(StandardNormal);
                m + v.sqrt() * z
            }
        }
    }

    fn init_proposal_logpdf(&self, x0: f64, y0: f64) -> f64 {
        match self.proposal {
            ProposalKind::Bootstrap => self.init_logpdf(x0),
            ProposalKind::Optimal => {
                let (m, v) = self.init_posterior(y0);
                normal_logpdf(x0, m, v)
            }
        }
    }

    fn proposal_sample<R: Rng + ?Sized>(&self, y: f64, x: f64, rng: &mut R) -> f64 {
        match self.proposal {
            ProposalKind::Bootstrap => self.trans_sample(x, rng),
            ProposalKind::Optimal => {
                let z: f64 = rng.sample(StandardNormal);
                self.opt_gain_x * x + self.opt_gain_y * y + self.opt_sd * z
            }
        }
    }

    fn proposal_logpdf(&self, x_new: f64, y: f64, x: f64) -> f64 {
        match self.proposal {
            ProposalKind::Bootstrap => self.trans_logpdf(x_new, x),
            ProposalKind::Optimal => normal_logpdf(x_new, self.opt_gain_x * x + self.opt_gain_y * y, self.opt_var),
        }
    }

    fn predictive_logweight(&self, y: f64, x: f64) -> f64 {
        match self.proposal {
            ProposalKind::Bootstrap => 0.0,
            ProposalKind::Optimal => normal_logpdf(y, self.theta.rho * x, self.pred_var),
        }
    }

    fn trans_log_bound(&self) -> Option<f64> {
        Some(self.trans_lognorm)
    }

    fn proposal_name(&self) -> &'static str {
        match self.proposal {
            ProposalKind::Bootstrap => "bootstrap",
            ProposalKind::Optimal => "optimal",
        }
    }

    fn incremental_logweight(&self, y: f64, x_prev: f64, x: f64) -> f64 {
        match self.proposal {
            ProposalKind::Bootstrap => self.obs_logpdf(y, x),
            ProposalKind::Optimal => {
                self.obs_logpdf(y, x) + self.trans_logpdf(x, x_prev)
                    - self.proposal_logpdf(x, y, x_prev)
                    - self.predictive_logweight(y, x_prev)
            }
        }
    }
}

/// Latent states and observations `x_{0:T}`, `y_{0:T}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<f64>,
    pub observations: Vec<f64>,
}

impl Trajectory {
    pub fn new(states: Vec<f64>, observations: Vec<f64>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::NoObservations);
        }
        if states.len() != observations.len() {
            return Err(Error::InvalidParameter(format!(
                "{} states but {} observations",
                states.len(),
                observations.len()
            )));
        }
        Ok(Trajectory { states, observations })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of the last time step, `T`.
    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }
}

/// Simulates `x_{0:T}, y_{0:T}` from the linear-Gaussian model.
pub fn simulate_lgssm(theta: &Theta, init: InitialLaw, horizon: usize, seed: u64) -> Result<Trajectory> {
    let mut rng = from_seed(seed);
    simulate_lgssm_with(theta, init, horizon, &mut rng)
}

pub fn simulate_lgssm_with<R: Rng + ?Sized>(
    theta: &Theta,
    init: InitialLaw,
    horizon: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    theta.validate()?;
    let (m0, v0) = init.moments(theta)?;
    let (tau, sigma) = (theta.tau2.sqrt(), theta.sigma2.sqrt());
    let mut states = Vec::with_capacity(horizon + 1);
    let mut observations = Vec::with_capacity(horizon + 1);
    let mut x = m0 + v0.sqrt() * rng.sample::<f64, _>(StandardNormal);
    for n in 0..=horizon {
        if n > 0 {
            x = theta.rho * x + tau * rng.sample::<f64, _>(StandardNormal);
        }
        let v: f64 = rng.sample(StandardNormal);
        states.push(x);
        observations.push(x + sigma * v);
    }
    Trajectory::new(states, observations)
}

/// Checks every observation is finite.
pub fn check_observations(y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::NoObservations);
    }
    match y.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteObservation { index }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn th(r: f64, t: f64, s: f64) -> Theta {
        Theta::new(r, t, s).unwrap()
    }

    #[test]
    fn theta_validation() {
        assert!(Theta::new(1.2, 1.0, 1.0).is_err());
        assert!(Theta::new(0.5, 0.0, 1.0).is_err());
        assert!(Theta::new(0.5, 1.0, -1.0).is_err());
        assert!(Theta::new(-1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn unit_rho_rejected_under_stationary_law() {
        let e = simulate_lgssm(&th(1.0, 1.0, 1.0), InitialLaw::Stationary, 10, 1);
        assert!(matches!(e, Err(Error::InvalidParameter(_))));
        let ok = simulate_lgssm(&th(1.0, 1.0, 1.0), InitialLaw::Fixed { mean: 0.0, var: 1.0 }, 10, 1);
        assert!(ok.is_ok());
    }

    #[test]
    fn simulation_is_reproducible() {
        let t = th(0.8, 0.1, 1.0);
        let a = simulate_lgssm(&t, InitialLaw::Stationary, 500, 99).unwrap();
        let b = simulate_lgssm(&t, InitialLaw::Stationary, 500, 99).unwrap();
        assert_eq!(
            a.states.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.states.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(a.observations, b.observations);
        assert_eq!(a.len(), 501);
    }

    #[test]
    fn zero_horizon_gives_single_point() {
        let tr = simulate_lgssm(&th(0.5, 1.0, 1.0), InitialLaw::Stationary, 0, 3).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.horizon(), 0);
    }

    #[test]
    fn density_examples() {
        let m = lg_densities(th(0.8, 0.1, 1.0), InitialLaw::Stationary).unwrap();
        let expect = -0.5 * (2.0 * std::f64::consts::PI * 0.1).ln();
        assert!((m.trans_logpdf(0.8, 1.0) - expect).abs() < 1e-14);
        assert!((m.obs_logpdf(0.3, 0.3) + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-14);
        let m = lg_densities(th(0.5, 0.75, 1.0), InitialLaw::Stationary).unwrap();
        assert!((m.init_logpdf(0.0) + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-14);
    }

    #[test]
    fn transition_density_integrates_to_one() {
        let m = lg_densities(th(0.7, 0.3, 1.0), InitialLaw::Stationary).unwrap();
        for &x in &[-3.0, 0.0, 1.5] {
            let (lo, hi, n) = (-15.0, 15.0, 60_000);
            let h = (hi - lo) / n as f64;
            let s: f64 = (0..=n)
                .map(|k| {
                    let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                    w * m.trans_logpdf(lo + k as f64 * h, x).exp()
                })
                .sum::<f64>()
                * h;
            assert!((s - 1.0).abs() < 1e-6, "{s}");
        }
    }

    #[test]
    fn optimal_proposal_by_hand() {
        let m = lg_optimal_proposal(th(1.0, 1.0, 1.0), InitialLaw::Fixed { mean: 0.0, var: 1.0 }).unwrap();
        let (mean, var) = m.optimal_moments(2.0, 0.0);
        assert!((var - 0.5).abs() < 1e-15);
        assert!((mean - 1.0).abs() < 1e-15);
        // Uninformative observation: proposal degrades to the prior.
        let m = lg_optimal_proposal(th(0.6, 0.2, 1e12), InitialLaw::Stationary).unwrap();
        let (mean, var) = m.optimal_moments(5.0, 2.0);
        assert!((var - 0.2).abs() < 1e-9);
        assert!((mean - 1.2).abs() < 1e-9);
    }

    #[test]
    fn optimal_proposal_weight_is_constant() {
        let m = lg_optimal_proposal(th(0.8, 0.1, 1.0), InitialLaw::Stationary).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let y = 0.7;
        let w0 = m.incremental_logweight(y, 0.0, 0.0);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..100 {
            let x_prev: f64 = rng.random_range(-3.0..3.0);
            let x: f64 = rng.random_range(-3.0..3.0);
            let w = m.incremental_logweight(y, x_prev, x);
            // log-space difference == relative difference of the weights
            assert!((w - w0).abs() < 1e-12);
            lo = lo.min(w);
            hi = hi.max(w);
        }
        assert!((hi - lo).exp() <= 1.0 + 1e-10);
    }
}
