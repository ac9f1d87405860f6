//! Library side of the `catguard` binary: config files, the three
//! subcommands and their output formats.
//!
//! Exit codes are 0 on success, 1 when validation fails, 2 for usage and
//! config errors and 3 for dimension, numerical or output-file errors.

pub mod error;
pub mod manifest;
pub mod output;
pub mod predict;
pub mod simulate;
pub mod sweep;
pub mod validate;

pub use error::{CliError, Result};
pub use manifest::{ConfigFile, Format, Overrides, RunManifest, SweepAxis};
pub use simulate::cmd_simulate;
pub use sweep::cmd_sweep;
pub use validate::{cmd_validate, Level, Suite, ValidationReport};

/// Variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CATGUARD_THREADS";
