use kerr_core::KerrError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] KerrError),
    #[error("oracle mismatch: {0}")]
    Mismatch(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Numerical(KerrError::InvalidParameter { .. }) => 2,
            CliError::Numerical(_) | CliError::Io { .. } | CliError::Format(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "invalid_arguments",
            CliError::Numerical(KerrError::InvalidParameter { .. }) => "invalid_arguments",
            CliError::Numerical(KerrError::NotConverged { .. }) => "not_converged",
            CliError::Numerical(_) => "numerical_failure",
            CliError::Mismatch(_) => "oracle_mismatch",
            CliError::Io { .. } => "io",
            CliError::Format(_) => "format",
        }
    }

    /// Single-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}
