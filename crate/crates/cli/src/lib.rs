//! Experiment runner: reads a JSON experiment file, runs its scenarios and
//! writes reports.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::ExperimentSpec;
pub use error::CliError;
pub use run::{run_spec, Report};

/// Process exit status: all verdicts passed.
pub const EXIT_PASS: i32 = 0;
/// At least one verdict failed.
pub const EXIT_FAIL: i32 = 1;
/// The experiment could not be parsed, validated or computed.
pub const EXIT_ERROR: i32 = 2;
