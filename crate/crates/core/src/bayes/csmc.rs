//! Conditional SMC and particle Gibbs.

use rand::Rng;

use super::conditionals::lg_theta_conditionals;
use super::pmmh::ChainRecord;
use super::prior::PriorSpec;
use super::suffstats::SuffStats;
use crate::error::{Error, Result};
use crate::filter::{run_filter, run_filter_frozen, FilterOptions, FilterOutput};
use crate::model::{check_observations, InitialLaw, LinearGaussian, ProposalKind, StateSpaceModel, Theta};
use crate::rng::{streams, substream};
use crate::smooth::{ffbsa_sample, BackwardMode};

/// Particle filter with particle 0 pinned to `reference` at every time.
pub fn csmc<M: StateSpaceModel + ?Sized, R: Rng + ?Sized>(
    model: &M,
    y: &[f64],
    n: usize,
    reference: &[f64],
    options: &FilterOptions,
    rng: &mut R,
) -> Result<FilterOutput> {
    check_observations(y)?;
    if reference.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "reference path has length {}, expected {}",
            reference.len(),
            y.len()
        )));
    }
    run_filter_frozen(model, y, n, options, Some(reference), rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgibbsOptions {
    pub n: usize,
    pub iters: usize,
    pub init: InitialLaw,
    pub proposal: ProposalKind,
    pub filter: FilterOptions,
    pub store_paths: bool,
}

impl Default for PgibbsOptions {
    fn default() -> Self {
        PgibbsOptions {
            n: 100,
            iters: 1000,
            init: InitialLaw::Stationary,
            proposal: ProposalKind::Bootstrap,
            filter: FilterOptions::default(),
            store_paths: false,
        }
    }
}

/// Particle Gibbs with backward sampling: alternate `theta | x` (exact
/// conditionals) and `x | theta` (conditional SMC followed by one backward
/// draw). Every move is accepted; `loglik_hat` holds the conditional
/// filter's estimate.
pub fn pgibbs(y: &[f64], prior: &PriorSpec, theta0: &Theta, opts: &PgibbsOptions, seed: u64) -> Result<ChainRecord> {
    check_observations(y)?;
    prior.validate()?;
    theta0.validate()?;
    if opts.n == 0 {
        return Err(Error::InvalidParameter("particle count must be >= 1".into()));
    }
    let mut rng = substream(seed, streams::MCMC);
    let mut theta = *theta0;
    let model = LinearGaussian::new(theta, opts.init, opts.proposal)?;
    let first = run_filter(&model, y, opts.n, &opts.filter, &mut rng)?;
    let mut path = ffbsa_sample(&first, &model, 1, BackwardMode::Direct, &mut rng)?.paths.remove(0);
    let mut rec = ChainRecord { initial: Some(theta), initial_loglik: first.loglik(), ..Default::default() };
    for _ in 0..opts.iters {
        theta = lg_theta_conditionals(&SuffStats::from_path(&path, y), prior, &theta, opts.init, &mut rng)?;
        let model = LinearGaussian::new(theta, opts.init, opts.proposal)?;
        let out = csmc(&model, y, opts.n, &path, &opts.filter, &mut rng)?;
        path = ffbsa_sample(&out, &model, 1, BackwardMode::Direct, &mut rng)?.paths.remove(0);
        rec.thetas.push(theta);
        rec.proposals.push(theta);
        rec.loglik_hat.push(out.loglik());
        rec.proposal_loglik.push(out.loglik());
        rec.accepted.push(true);
        rec.log_u.push(f64::NEG_INFINITY);
        if opts.store_paths {
            rec.paths.push(path.clone());
        }
    }
    Ok(rec)
}
