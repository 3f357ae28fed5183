use thiserror::Error;

/// Errors raised by the library.
///
/// Variants map onto the failure classes the CLI distinguishes: domain and
/// parameter errors are caller mistakes, certification and model-assumption
/// errors mean an invariant of the construction did not hold.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0} violated")]
    Parameter(String),

    #[error("certification failed: {bound} ({detail})")]
    Certification { bound: String, detail: String },

    #[error("integer overflow while computing {0}")]
    Overflow(String),

    #[error("no sign change for varpi = {varpi} at yhat = {yhat:?} on [{lo}, {hi}]")]
    Bracketing {
        varpi: f64,
        yhat: Vec<f64>,
        lo: f64,
        hi: f64,
    },

    #[error("model assumption violated: {0}")]
    ModelAssumption(String),

    #[error("invariant violated: {invariant} at {witness}")]
    Invariant { invariant: String, witness: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn certification(bound: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Certification {
            bound: bound.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
