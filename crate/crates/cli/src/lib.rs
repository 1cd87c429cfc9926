//! Command-line front end for the SGD dynamics laboratory.
//!
//! Three subcommands: `run` executes an experiment described by a config
//! file and leaves a self-contained run directory (outputs, a resolved copy
//! of the config, a manifest with checksums); `validate` checks a config
//! without running anything; `report` re-verifies a finished run directory
//! against its manifest. Exit codes: 0 on success, 2 on validation or
//! integrity failure, 3 when an experiment aborts mid-run.

use std::fmt;

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod plan;
pub mod runner;

/// Failures surfaced to the shell. The two variants map onto the two
/// nonzero exit codes.
#[derive(Debug)]
pub enum CliError {
    /// The config (or a run directory under `report`) is unusable. Carries
    /// one message per offending field so a bad file is fixed in one pass.
    Validation(Vec<String>),
    /// The experiment started and then failed; the run directory holds a
    /// manifest marked `failed` with the same message.
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Run(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(errors) => {
                writeln!(f, "configuration invalid ({} error(s)):", errors.len())?;
                for e in errors {
                    writeln!(f, "  - {e}")?;
                }
                Ok(())
            }
            CliError::Run(msg) => write!(f, "run failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}
