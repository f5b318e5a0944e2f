//! Sequential Monte Carlo for state-space models.
//!
//! The crate covers the auxiliary particle filter (bootstrap and SISR are
//! special cases), every standard estimator of smoothed additive functionals,
//! off-line and on-line maximum-likelihood drivers, and particle MCMC. The
//! scalar linear-Gaussian model ships with an exact Kalman oracle, so every
//! estimator can be compared against ground truth.
//!
//! ```
//! use sspe::prelude::*;
//!
//! let theta = Theta::new(0.8, 0.1, 1.0).unwrap();
//! let data = simulate_lgssm(&theta, InitialLaw::Stationary, 50, 7).unwrap();
//! let model = lg_optimal_proposal(theta, InitialLaw::Stationary).unwrap();
//! let mut rng = sspe::rng::from_seed(1);
//! let out = run_filter(&model, &data.observations, 500, &FilterOptions::default(), &mut rng).unwrap();
//! let exact = kalman_loglik(&theta, InitialLaw::Stationary, &data.observations).unwrap();
//! assert!((out.loglik() - exact).abs() < 1.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod error;
pub mod filter;
pub mod io;
pub mod kalman;
pub mod ml;
pub mod model;
pub mod particle;
pub mod rng;
pub mod smooth;
pub mod stats;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::filter::{run_filter, FilterOptions, FilterOutput, ParticleFilter};
    pub use crate::kalman::{
        exact_additive, exact_em_step, exact_score, kalman_filter, kalman_loglik, kalman_smoother, rts_smoother,
        KalmanResult,
    };
    pub use crate::model::{
        lg_densities, lg_optimal_proposal, simulate_lgssm, FreeMask, InitialLaw, LinearGaussian, Param, ProposalKind,
        StateSpaceModel, Theta, Trajectory,
    };
    pub use crate::particle::{ess, normalize_log_weights, resample, ParticleSystem, ResamplingScheme};
    pub use crate::smooth::functional::{AdditiveFunctional, QuadraticFunctional};
}
