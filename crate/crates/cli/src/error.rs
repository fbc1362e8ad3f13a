use std::path::PathBuf;

use thiserror::Error;
use virtual_spin::SelectivityWarning;

use crate::circuit::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Circuit(#[from] ParseError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("gate {index} (`{source_text}`, circuit line {line}) cannot be compiled: {message}")]
    Compile {
        index: usize,
        source_text: String,
        line: usize,
        message: String,
        warnings: Vec<SelectivityWarning>,
    },

    #[error("{failed} validation check(s) failed")]
    Validation { failed: usize },

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Circuit(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Compile { .. } => 4,
            CliError::Validation { .. } => 5,
            CliError::Internal(_) => 1,
        }
    }
}

/// Errors raised while loading or interpreting user input.
impl From<virtual_spin::Error> for CliError {
    fn from(e: virtual_spin::Error) -> Self {
        use virtual_spin::Error as E;
        match e {
            E::InvalidParameter(_) | E::Config { .. } | E::Json(_) => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}
