use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// Every variant carries enough context (identity name, tensor component,
/// degree reached) to locate the failure without re-running.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate {what}: constant term is singular")]
    Degeneracy { what: String },

    #[error("invalid geometry: {identity} fails at {witness}")]
    InvalidGeometry { identity: String, witness: String },

    #[error("internal consistency failure: {identity} fails at {witness}")]
    InternalConsistency { identity: String, witness: String },

    #[error("jet order exhausted in {context} (reached degree {achieved})")]
    Order { context: String, achieved: u32 },

    #[error("grading error: {0}")]
    Grading(String),

    #[error("nu-divisibility failure: {0}")]
    Divisibility(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("variable x{index} out of range for dimension {dim}")]
    VariableIndex { index: usize, dim: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn consistency(identity: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::InternalConsistency {
            identity: identity.into(),
            witness: witness.into(),
        }
    }

    pub(crate) fn order(context: impl Into<String>, achieved: u32) -> Self {
        Error::Order {
            context: context.into(),
            achieved,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidGeometry { .. } | Error::Degeneracy { .. } => 1,
            Error::MalformedInput(_)
            | Error::Syntax { .. }
            | Error::VariableIndex { .. }
            | Error::Io(_)
            | Error::Shape(_)
            | Error::Order { .. } => 2,
            Error::InternalConsistency { .. } | Error::Grading(_) | Error::Divisibility(_) => 3,
        }
    }
}
