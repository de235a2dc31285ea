use std::path::PathBuf;

/// Process exit codes per failure class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const INFEASIBLE: u8 = 3;
    pub const BUDGET: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Solver(_) => exit::IO,
            CliError::Parse { .. } | CliError::Usage(_) => exit::PARSE,
            CliError::Infeasible(_) => exit::INFEASIBLE,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Parse { path: path.into(), message: message.to_string() }
    }
}
