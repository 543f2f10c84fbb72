//! Front end for `lr-cooling`: config parsing, the five subcommands and
//! their CSV/JSON outputs.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;

pub use commands::{CliError, Context};
pub use config::{ConfigError, OutputFormat, RunConfig};
pub use report::CoolingReport;
