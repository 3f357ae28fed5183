use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed arguments or configuration; the message names the field.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] resokam_core::Error),

    /// A check ran to completion and found a violated invariant; the report
    /// with the witness has been written.
    #[error("invariant check failed: {0}")]
    Violation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 0 success, 1 internal, 2 parameter or validation, 3 invariant violation.
    pub fn exit_code(&self) -> i32 {
        use resokam_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::Domain(_) | E::Parameter(_) | E::Overflow(_) | E::Bracketing { .. } => 2,
                E::Certification { .. } | E::ModelAssumption(_) | E::Invariant { .. } => 3,
            },
            CliError::Violation(_) => 3,
            CliError::Io { .. } | CliError::Internal(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
