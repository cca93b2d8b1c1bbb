use qlz_core::Error;

use crate::table::Table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(Error),
    #[error("{0}")]
    Truncation(Error),
    /// Validation ran but some checks exceeded their thresholds; the
    /// report is still written.
    #[error("validation failed: {failed}")]
    Validation { report: Box<Table>, failed: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => CliError::Config(msg),
            Error::TruncationOverflow { .. } | Error::TruncationEscalation { .. } => CliError::Truncation(e),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) | CliError::Validation { .. } => 3,
            CliError::Truncation(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Numerical(_) => "numerical",
            CliError::Validation { .. } => "validation",
            CliError::Truncation(_) => "truncation",
        }
    }

    /// One-line JSON record for standard error.
    pub fn record(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}
