//! Parameter sweeps over the lossy Kerr channel, written as CSV or JSON with
//! a JSON metadata sidecar.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use args::{parse_list, Cli, Command};
pub use commands::run;
pub use config::RunConfig;
pub use error::CliError;
pub use output::{read_table, Meta, Table, SUPPORTED_SCHEMA_VERSIONS};
