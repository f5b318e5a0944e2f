//! Particle marginal Metropolis-Hastings.
//!
//! The chain moves in the unconstrained coordinates of
//! [`crate::ml::reparam`] with a Gaussian random walk on the free
//! components. The target in those coordinates is
//! `log p_hat(y | theta) + log p(theta) + log |d theta / d u|`, so the
//! proposal is symmetric and its density cancels.

use rand::Rng;
use rand_distr::StandardNormal;

use super::prior::PriorSpec;
use crate::error::{Error, Result};
use crate::filter::{run_filter, ParticleFilter};
use crate::kalman::kalman_loglik;
use crate::ml::backend::ParticleConfig;
use crate::ml::reparam::{from_unconstrained, log_jacobian, to_unconstrained};
use crate::model::{check_observations, InitialLaw, LinearGaussian, Theta};
use crate::rng::{replicate_seed, streams, substream};
use crate::stats::std_dev;

/// Source of the likelihood inside the acceptance ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LikelihoodBackend {
    /// Kalman filter: the ideal marginal MH chain.
    Exact,
    /// Unbiased particle estimate.
    Particle(ParticleConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmmhOptions {
    pub iters: usize,
    /// Random-walk scale in unconstrained coordinates.
    pub rw_scale: f64,
    pub backend: LikelihoodBackend,
    pub init: InitialLaw,
    /// Keep one smoothed path per iteration (particle backend only).
    pub store_paths: bool,
    /// Add the (cancelling) proposal densities explicitly.
    pub explicit_proposal: bool,
}

impl Default for PmmhOptions {
    fn default() -> Self {
        PmmhOptions {
            iters: 10_000,
            rw_scale: 0.1,
            backend: LikelihoodBackend::Exact,
            init: InitialLaw::Stationary,
            store_paths: false,
            explicit_proposal: false,
        }
    }
}

/// Everything needed to replay the accept/reject decisions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChainRecord {
    pub initial: Option<Theta>,
    pub initial_loglik: f64,
    /// State after each iteration.
    pub thetas: Vec<Theta>,
    /// Likelihood estimate attached to the state after each iteration.
    pub loglik_hat: Vec<f64>,
    pub accepted: Vec<bool>,
    pub proposals: Vec<Theta>,
    /// `-inf` when the filter collapsed.
    pub proposal_loglik: Vec<f64>,
    pub log_u: Vec<f64>,
    pub collapses: usize,
    pub paths: Vec<Vec<f64>>,
}

impl ChainRecord {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.accepted.is_empty() {
            return 0.0;
        }
        self.accepted.iter().filter(|a| **a).count() as f64 / self.accepted.len() as f64
    }

    /// Trace of one parameter.
    pub fn trace(&self, p: crate::model::Param) -> Vec<f64> {
        self.thetas.iter().map(|t| t.get(p)).collect()
    }

    /// Recomputes every accept/reject decision from the stored quantities.
    pub fn replay_decisions(&self, prior: &PriorSpec) -> Vec<bool> {
        let mut cur = match self.initial {
            Some(t) => t,
            None => return Vec::new(),
        };
        let mut cur_ll = self.initial_loglik;
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.proposals.len() {
            let acc = accept(
                self.log_u[k],
                log_target(cur_ll, &cur, prior),
                log_target(self.proposal_loglik[k], &self.proposals[k], prior),
                0.0,
            );
            out.push(acc);
            cur = self.thetas[k];
            cur_ll = self.loglik_hat[k];
        }
        out
    }

    /// CSV `iter,rho,tau2,sigma2,loglik_hat,accepted`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::io::fmt_f64;
        writeln!(w, "iter,rho,tau2,sigma2,loglik_hat,accepted")?;
        for (k, t) in self.thetas.iter().enumerate() {
            writeln!(
                w,
                "{k},{},{},{},{},{}",
                fmt_f64(t.rho),
                fmt_f64(t.tau2),
                fmt_f64(t.sigma2),
                fmt_f64(self.loglik_hat[k]),
                u8::from(self.accepted[k])
            )?;
        }
        Ok(())
    }
}

fn log_target(loglik: f64, theta: &Theta, prior: &PriorSpec) -> f64 {
    if loglik == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    loglik + prior.logpdf(theta) + log_jacobian(theta)
}

fn accept(log_u: f64, cur: f64, prop: f64, log_q_ratio: f64) -> bool {
    let log_alpha = prop - cur + log_q_ratio;
    log_u < log_alpha
}

/// Likelihood estimate and optionally a path drawn from the final weights.
fn estimate<R: Rng + ?Sized>(
    theta: &Theta,
    y: &[f64],
    opts: &PmmhOptions,
    rng: &mut R,
) -> Result<(f64, Option<Vec<f64>>)> {
    match opts.backend {
        LikelihoodBackend::Exact => Ok((kalman_loglik(theta, opts.init, y)?, None)),
        LikelihoodBackend::Particle(cfg) => {
            let model = LinearGaussian::new(*theta, opts.init, cfg.proposal)?;
            if opts.store_paths {
                let out = run_filter(&model, y, cfg.n, &cfg.filter, rng)?;
                let path = out.sample_path(rng);
                Ok((out.loglik(), Some(path)))
            } else {
                let mut pf = ParticleFilter::new(cfg.n, cfg.filter)?;
                for &yt in y {
                    pf.step(&model, yt, rng)?;
                }
                Ok((pf.loglik(), None))
            }
        }
    }
}

/// Runs the chain from `theta0`; the free mask of `theta0` selects the
/// sampled components.
pub fn pmmh(y: &[f64], prior: &PriorSpec, theta0: &Theta, opts: &PmmhOptions, seed: u64) -> Result<ChainRecord> {
    check_observations(y)?;
    prior.validate()?;
    theta0.validate()?;
    if !(opts.rw_scale > 0.0) {
        return Err(Error::InvalidParameter(format!("random-walk scale must be > 0, got {}", opts.rw_scale)));
    }
    if theta0.free.count() == 0 {
        return Err(Error::InvalidParameter("no free parameters to sample".into()));
    }
    let mut rng = substream(seed, streams::MCMC);
    let mut cur = *theta0;
    let (mut cur_ll, mut cur_path) = estimate(&cur, y, opts, &mut rng)?;
    if !cur_ll.is_finite() || !prior.logpdf(&cur).is_finite() {
        return Err(Error::InvalidParameter("initial state has zero posterior density".into()));
    }
    let mut rec = ChainRecord { initial: Some(cur), initial_loglik: cur_ll, ..Default::default() };
    let free = cur.free;
    for _ in 0..opts.iters {
        let mut u = to_unconstrained(&cur);
        let u_cur = u;
        for p in free.free_params() {
            let z: f64 = rng.sample(StandardNormal);
            u[p.index()] += opts.rw_scale * z;
        }
        let prop = from_unconstrained(&u, &cur);
        let (prop_ll, prop_path) = match estimate(&prop, y, opts, &mut rng) {
            Ok(v) => v,
            Err(Error::ParticleCollapse { .. }) => {
                rec.collapses += 1;
                (f64::NEG_INFINITY, None)
            }
            Err(e) => return Err(e),
        };
        let log_u = rng.random::<f64>().ln();
        let log_q = if opts.explicit_proposal {
            let lq = |from: &[f64; 3], to: &[f64; 3]| -> f64 {
                free.free_params()
                    .iter()
                    .map(|p| {
                        let d = (to[p.index()] - from[p.index()]) / opts.rw_scale;
                        -0.5 * d * d
                    })
                    .sum()
            };
            lq(&u, &u_cur) - lq(&u_cur, &u)
        } else {
            0.0
        };
        let acc = accept(log_u, log_target(cur_ll, &cur, prior), log_target(prop_ll, &prop, prior), log_q);
        if acc {
            cur = prop;
            cur_ll = prop_ll;
            cur_path = prop_path;
        }
        rec.thetas.push(cur);
        rec.loglik_hat.push(cur_ll);
        rec.accepted.push(acc);
        rec.proposals.push(prop);
        rec.proposal_loglik.push(prop_ll);
        rec.log_u.push(log_u);
        if let Some(p) = &cur_path {
            rec.paths.push(p.clone());
        }
    }
    Ok(rec)
}

/// Standard deviation of the log-likelihood estimate for each candidate `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub table: Vec<(usize, f64)>,
    pub chosen: usize,
    /// Whether some candidate reached the target.
    pub reached: bool,
}

/// Smallest `N` whose standard deviation is at most `target`; otherwise the
/// largest candidate, flagged as not reached.
pub fn choose_n(table: &[(usize, f64)], target: f64) -> (usize, bool) {
    let mut sorted = table.to_vec();
    sorted.sort_by_key(|e| e.0);
    match sorted.iter().find(|e| e.1 <= target) {
        Some(e) => (e.0, true),
        None => (sorted.last().map(|e| e.0).unwrap_or(0), false),
    }
}

/// Estimates the spread of `log p_hat(y | theta_pilot)` with `replicates`
/// independent filters per candidate and picks `N` by [`choose_n`]. The
/// particle count in `backend` is replaced by each candidate.
#[allow(clippy::too_many_arguments)]
pub fn tune_pmmh_n(
    y: &[f64],
    theta_pilot: &Theta,
    init: InitialLaw,
    backend: LikelihoodBackend,
    candidates: &[usize],
    replicates: usize,
    target: f64,
    seed: u64,
) -> Result<TuneResult> {
    if candidates.is_empty() || replicates < 2 {
        return Err(Error::InvalidParameter("need candidates and at least 2 replicates".into()));
    }
    let mut table = Vec::with_capacity(candidates.len());
    for (ci, &n) in candidates.iter().enumerate() {
        let opts = PmmhOptions {
            backend: match backend {
                LikelihoodBackend::Exact => LikelihoodBackend::Exact,
                LikelihoodBackend::Particle(cfg) => LikelihoodBackend::Particle(ParticleConfig { n, ..cfg }),
            },
            init,
            ..Default::default()
        };
        let mut lls = Vec::with_capacity(replicates);
        for r in 0..replicates {
            let mut rng = substream(replicate_seed(seed, (ci * replicates + r) as u64), streams::FILTER);
            match estimate(theta_pilot, y, &opts, &mut rng) {
                Ok((ll, _)) => lls.push(ll),
                Err(Error::ParticleCollapse { .. }) => lls.push(f64::NEG_INFINITY),
                Err(e) => return Err(e),
            }
        }
        let sd = if lls.iter().all(|v| v.is_finite()) { std_dev(&lls) } else { f64::INFINITY };
        table.push((n, sd));
    }
    let (chosen, reached) = choose_n(&table, target);
    Ok(TuneResult { table, chosen, reached })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{simulate_lgssm, FreeMask, ProposalKind};

    fn setup() -> (Vec<f64>, Theta) {
        let th = Theta::new(0.5, 1.0, 1.0).unwrap();
        let y = simulate_lgssm(&th, InitialLaw::Stationary, 30, 11).unwrap().observations;
        (y, th.with_free(FreeMask::new(true, false, false)))
    }

    #[test]
    fn decisions_replay_exactly() {
        let (y, th) = setup();
        let opts = PmmhOptions {
            iters: 200,
            backend: LikelihoodBackend::Particle(ParticleConfig::new(50, ProposalKind::Bootstrap)),
            ..Default::default()
        };
        let rec = pmmh(&y, &PriorSpec::default(), &th, &opts, 3).unwrap();
        assert_eq!(rec.replay_decisions(&PriorSpec::default()), rec.accepted);
        assert!(rec.acceptance_rate() > 0.05);
    }

    #[test]
    fn explicit_symmetric_proposal_changes_nothing() {
        let (y, th) = setup();
        let a = PmmhOptions { iters: 300, ..Default::default() };
        let b = PmmhOptions { explicit_proposal: true, ..a.clone() };
        let ra = pmmh(&y, &PriorSpec::default(), &th, &a, 5).unwrap();
        let rb = pmmh(&y, &PriorSpec::default(), &th, &b, 5).unwrap();
        for (x, z) in ra.thetas.iter().zip(&rb.thetas) {
            assert!((x.rho - z.rho).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_backend_tunes_to_smallest() {
        let (y, th) = setup();
        let t = tune_pmmh_n(&y, &th, InitialLaw::Stationary, LikelihoodBackend::Exact, &[10, 100, 1000], 5, 1.3, 1)
            .unwrap();
        assert_eq!(t.chosen, 10);
        assert!(t.reached);
        assert_eq!(choose_n(&[(10, 3.0), (20, 2.0)], 1.3), (20, false));
    }
}
