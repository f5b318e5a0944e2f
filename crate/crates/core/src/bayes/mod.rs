//! Bayesian inference for static parameters.

pub mod conditionals;
pub mod csmc;
pub mod mws;
pub mod pmmh;
pub mod prior;
pub mod suffstats;

pub use conditionals::{lg_theta_conditionals, truncated_normal};
pub use csmc::{csmc, pgibbs, PgibbsOptions};
pub use mws::{mcmc_within_smc, MwsOptions, MwsOutput};
pub use pmmh::{choose_n, pmmh, tune_pmmh_n, ChainRecord, LikelihoodBackend, PmmhOptions, TuneResult};
pub use prior::PriorSpec;
pub use suffstats::SuffStats;
