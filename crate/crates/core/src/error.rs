use thiserror::Error;

use crate::pulse::SelectivityWarning;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("Jacobi diagonalization did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NotConverged { sweeps: usize, off_norm: f64 },

    #[error("tone at {carrier} rad/s is not resonant with transition {upper}<->{lower} ({expected} rad/s)")]
    NoMatchingLine {
        carrier: f64,
        upper: usize,
        lower: usize,
        expected: f64,
    },

    #[error("{0}<->{1} is not an allowed transition")]
    ForbiddenTransition(usize, usize),

    #[error("tones in one group share level {level}")]
    TargetConflict { level: usize },

    #[error("integration needs {required} steps, cap is {cap}")]
    ResourceLimit { required: u64, cap: u64 },

    #[error("schedule is not selective: {}", format_warnings(.0))]
    Selectivity(Vec<SelectivityWarning>),

    /// `line` is 0 when the problem is not tied to one line.
    #[error("config{}: {message}", line_prefix(*.line))]
    Config {
        line: usize,
        key: Option<String>,
        message: String,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn line_prefix(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" line {line}")
    }
}

fn format_warnings(warnings: &[SelectivityWarning]) -> String {
    warnings
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
