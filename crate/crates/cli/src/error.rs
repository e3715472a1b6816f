use qbo_core::{Error, ErrorClass};
use thiserror::Error as ThisError;

/// Exit codes: 0 success, 2 analytic negative, 3 validation error,
/// 4 numerical failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYTIC_NEGATIVE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("unknown corpus kind: {0} (expected shared-semisimple, nilpotent-pair, permuted-diagonal, or random-dense)")]
    UnknownKind(String),

    #[error("io error: {0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_)
            | CliError::Validation(_)
            | CliError::UnknownName(_)
            | CliError::UnknownKind(_)
            | CliError::Io(_) => EXIT_VALIDATION,
            CliError::Core(e) => match e.class() {
                ErrorClass::Validation => EXIT_VALIDATION,
                ErrorClass::AnalyticNegative => EXIT_ANALYTIC_NEGATIVE,
                ErrorClass::NumericalFailure => EXIT_NUMERICAL,
            },
        }
    }
}
