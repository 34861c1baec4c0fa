//! Scenario-driven front end: configuration parsing, pipeline orchestration
//! and artifact emission for the oamlink simulator.

// Validations use `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod pipeline;
pub mod scenario;

/// Pipeline failures carry the process exit code:
/// 2 config validation, 3 numerical contract, 4 I/O.
#[derive(Debug, Clone, PartialEq)]
pub enum StageError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        match self {
            StageError::Validation(_) => 2,
            StageError::Numerical(_) => 3,
            StageError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StageError::Validation(msg) => write!(f, "configuration error: {msg}"),
            StageError::Numerical(msg) => write!(f, "numerical contract violation: {msg}"),
            StageError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for StageError {}
