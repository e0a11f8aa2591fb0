use thiserror::Error;

/// Errors surfaced by every public entry point of the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain where the quantity is defined.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// The requested tolerance cannot be met with the configured budget.
    #[error("accuracy unreachable: requested {requested:e}, best estimate {achieved:e}")]
    AccuracyUnreachable { requested: f64, achieved: f64 },

    /// Parameters do not satisfy the hypotheses of any asymptotic regime.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// Quadrature finished but its error estimate exceeds the tolerance.
    #[error("tolerance unmet: value {value}, estimated error {est_error:e}")]
    ToleranceUnmet {
        value: num_complex::Complex64,
        est_error: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cache format: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
