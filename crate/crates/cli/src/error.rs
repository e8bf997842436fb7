use std::fmt;

use thiserror::Error;

/// Failure of a CLI run, mapped onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    InvalidSpec(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Instability(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidSpec(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Instability(_) => 4,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::InvalidSpec(_) => "invalid_spec",
            CliError::Solver(_) => "solver_failure",
            CliError::Instability(_) => "simulation_instability",
            CliError::Io(_) | CliError::Csv(_) => "io",
        }
    }

    /// One-line JSON report for stderr.
    pub fn report(&self) -> ErrorLine<'_> {
        ErrorLine(self)
    }
}

impl From<slicing_core::Error> for CliError {
    fn from(e: slicing_core::Error) -> Self {
        use slicing_core::Error as E;
        match e {
            E::InvalidParams(_) | E::InvalidConfig(_) | E::Domain(_) => {
                CliError::InvalidSpec(e.to_string())
            }
            E::UnstableLoad { .. } => CliError::Instability(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

pub struct ErrorLine<'a>(&'a CliError);

impl fmt::Display for ErrorLine<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = serde_json::json!({
            "error": self.0.kind(),
            "code": self.0.exit_code(),
            "message": self.0.to_string(),
        });
        write!(f, "{line}")
    }
}
