use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),

    #[error("malformed spec: {0}")]
    Json(serde_json::Error),

    #[error("invalid spec: {0}")]
    Spec(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] fsing_core::Error),
}

impl CliError {
    /// 2 for a failed mathematical precondition, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_precondition() => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(..) => "io",
            CliError::Json(_) | CliError::Spec(_) => "spec",
            CliError::Usage(_) => "usage",
            CliError::Core(e) if e.is_precondition() => "precondition",
            CliError::Core(_) => "parse",
        }
    }
}
