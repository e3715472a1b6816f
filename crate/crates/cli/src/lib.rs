//! Scenario ingestion, command dispatch, report serialization, and the
//! reproducible corpus generator behind the `qbo` binary.

pub mod commands;
pub mod corpus;
pub mod error;
pub mod report;
pub mod scenario;

pub use commands::{digest_bytes, parse_complex, run_command, Command, Overrides};
pub use corpus::{generate_corpus, CorpusKind};
pub use error::{CliError, EXIT_ANALYTIC_NEGATIVE, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};
pub use report::{Format, Report};
pub use scenario::{Scenario, Settings};
