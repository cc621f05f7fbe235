//! Certifier front end: JSON matrix documents in, triad reports and
//! solver certificates out.

pub mod input;
pub mod render;
pub mod triad;

use thiserror::Error;

/// Errors surfaced to the command line, keyed to the exit-code contract:
/// 1 input error, 2 numerical failure, 3 internal inconsistency.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A report with two conditions true and the third false. This never
    /// happens for correct arithmetic; it is a bug signal, not a state.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Inconsistency(_) => 3,
        }
    }
}
