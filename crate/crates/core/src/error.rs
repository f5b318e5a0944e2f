use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite observation at index {index}")]
    NonFiniteObservation { index: usize },

    #[error("no observations")]
    NoObservations,

    /// Every importance weight was zero at the given time step.
    #[error("particle collapse at time {time}: all weights are zero")]
    ParticleCollapse { time: usize },

    /// A particle at `time` has zero backward-kernel normaliser.
    #[error("unreachable particle {index} at time {time}")]
    UnreachableParticle { time: usize, index: usize },

    #[error("trajectory storage was not enabled for this filter run")]
    MissingTrajectories,

    #[error("rejection sampling requires a bound on the transition density")]
    MissingTransitionBound,

    #[error("additive functional is not quadratic; no exact expectation available")]
    UnsupportedFunctional,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid sufficient statistic: {0}")]
    InvalidStatistic(String),

    #[error("non-finite gradient at iteration {iteration}")]
    NonFiniteGradient { iteration: usize },

    /// A smoothing backend failed inside an iterative estimator.
    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::Iteration { iteration, source: Box::new(self) }
    }
}
