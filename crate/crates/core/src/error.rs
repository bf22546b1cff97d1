use thiserror::Error;

/// Errors produced by the photonz toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Probability mass beyond the truncation bound exceeds the tolerance.
    #[error(
        "truncation error: tail mass {tail_mass:.3e} beyond n_max={n_max} exceeds tolerance \
         {tolerance:.1e}; n_max >= {required_n_max} is required"
    )]
    Truncation {
        n_max: usize,
        tail_mass: f64,
        tolerance: f64,
        required_n_max: usize,
    },

    #[error("ill-conditioned inverse Bernoulli transform: {0}")]
    IllConditioned(String),

    #[error("numerical failure at iteration {iteration}: {detail}")]
    NumericalFailure { iteration: usize, detail: String },

    /// A sample has zero density under the mixture, so the log-likelihood is -inf.
    #[error("zero likelihood: sample {index} (z = {z}) has zero density under the distribution")]
    ZeroLikelihood { index: usize, z: f64 },

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
