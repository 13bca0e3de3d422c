use thiserror::Error;

/// Errors raised by the algebra kernel and the invariant computations.
///
/// The variants split into two families: malformed input (`Parse`,
/// `InvalidField`, `VariableMismatch`) and mathematical precondition
/// failures (everything else). [`Error::is_precondition`] tells them apart,
/// which the command-line front end uses to pick an exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("division by zero in the coefficient field")]
    DivisionByZero,

    #[error("variable mismatch: {0}")]
    VariableMismatch(String),

    #[error("exponent overflow: {0}")]
    ExponentOverflow(String),

    #[error("{q} is not a power of p^{e} (p = {p})")]
    NotAPower { q: u64, p: u64, e: u32 },

    #[error("depth exhausted: {0}")]
    DepthExhausted(String),

    #[error("ill-defined map: u * ({relation}) is not in the Frobenius power of the relations")]
    IllDefinedMap { relation: String },

    #[error("differentiation with respect to the base root variable is not supported")]
    BaseDerivative,

    #[error("colon by the zero ideal")]
    ColonByZero,

    #[error("{what} did not stabilize within {cap} iterations")]
    IterationCap { what: &'static str, cap: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }

    /// True for failures of a mathematical precondition, false for
    /// malformed input.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::Parse { .. } | Error::InvalidField(_) | Error::VariableMismatch(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
