//! Front end for the `eulerring` solver: JSON equation specifications in,
//! JSON solution reports out.

use thiserror::Error;

pub mod pipeline;
pub mod report;
pub mod spec;

pub use pipeline::{solve, Candidate, Settings};
pub use spec::{EquationSpec, Problem};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Resonance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Resonance(_) => 2,
        }
    }
}

/// Exit status for a report whose checks failed.
pub const EXIT_CHECK_FAILED: i32 = 3;
