//! Maximum-likelihood estimation of `theta`.

pub mod backend;
pub mod em;
pub mod gradient;
pub mod lambda;
pub mod online;
pub mod reparam;
pub mod schedule;

pub use backend::{additive_trace, smoothed_additive, Backend, ParticleConfig};
pub use em::{offline_em, EmOptions, EstimateTrace};
pub use gradient::{offline_gradient, GradientOptions, GradientStep};
pub use lambda::{lambda_map, lambda_map_averaged, InitialTerm, MStep};
pub use online::{online_em, online_gradient, OnlineOptions, OnlineSmoothing, OnlineTrace};
pub use schedule::StepSize;
