use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants split into input-validation problems and numerical failures;
/// [`Error::is_numerical`] tells the two apart so front ends can map them to
/// distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probability mass is invalid: {0}")]
    InvalidMass(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("operation expects {expected} variable(s), distribution has {found}")]
    Arity { expected: usize, found: usize },

    #[error("deterministic map is invalid: {0}")]
    InvalidMap(String),

    #[error("map domain size {map} does not match alphabet size {alphabet}")]
    MapMismatch { map: usize, alphabet: usize },

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("singular covariance: {0}")]
    Singular(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("independent evaluations disagree: {0}")]
    CrossCheck(String),

    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
}

impl Error {
    /// True for failures of the numerics (singularity, non-convergence,
    /// disagreement between routes) rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular(_) | Error::NoConvergence(_) | Error::CrossCheck(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
