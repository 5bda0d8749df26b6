use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The variants follow the failure classes the CLI maps onto exit codes:
/// input/validation problems, resource caps, and internal consistency
/// failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// A cap was hit during a trajectory computation; all steps before
    /// `last_valid_step` completed.
    #[error("truncated at step {last_valid_step}: {message}")]
    Truncated {
        last_valid_step: usize,
        message: String,
    },

    #[error("degenerate value: {0}")]
    Degenerate(String),

    #[error("positivity violation: {0}")]
    Positivity(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::Truncated { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
