use thiserror::Error;

/// Errors raised across the library.
///
/// The variants line up with the CLI exit codes: usage/parse problems,
/// numeric non-convergence, violated preconditions and resource caps.
#[derive(Debug, Error)]
pub enum GlassError {
    #[error("derivative order {0} is not supported (max 4)")]
    UnsupportedOrder(usize),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GlassError>;

impl GlassError {
    /// Process exit status for this error when surfaced by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            GlassError::NumericFailure(_) | GlassError::CheckFailed(_) => 2,
            GlassError::Precondition(_)
            | GlassError::DegenerateCovariance(_)
            | GlassError::Domain(_) => 3,
            GlassError::Resource(_) => 4,
            GlassError::UnsupportedOrder(_)
            | GlassError::InvalidMixture(_)
            | GlassError::Parse { .. }
            | GlassError::Usage(_)
            | GlassError::Io(_) => 1,
        }
    }
}
