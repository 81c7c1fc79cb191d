//! Command-line front end: configuration, dispatch and CSV/JSON output.

pub mod config;
pub mod error;
pub mod run;

pub use config::{parse_config, Parsed, ProblemFile, RunConfig, Subcommand, SCHEMA_VERSION};
pub use error::CliError;
pub use run::{dispatch, execute};
