//! Configuration, scenario dispatch, result files and the invariant suite
//! behind the `zenoclone` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod summary;
pub mod validate;

pub use config::{Format, RunConfig};
pub use error::{CliError, CliResult};
