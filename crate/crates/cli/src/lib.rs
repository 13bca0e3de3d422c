//! Command-line front end: JSON family specs in, text or JSON reports out.

pub mod commands;
pub mod error;
pub mod report;
pub mod spec;

pub use commands::{run, Cli, Command, Format, Options};
pub use error::CliError;
pub use report::Report;
pub use spec::{SpecFile, Problem};
