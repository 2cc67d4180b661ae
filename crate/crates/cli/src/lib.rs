//! Batch driver for Fermat functional-equation experiments: configuration,
//! the expression text codec, `report-v1` documents and the commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod sexpr;
pub mod values;

pub use commands::{run, Outcome};
pub use config::{Cli, CommandKind, Options, RunConfig};
pub use error::CliError;
pub use report::{ReportDocument, Verdict};
