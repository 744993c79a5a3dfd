//! Command-line verification of the qudit-assisted circuits and the linear
//! optical schemes. Every command produces a [`report::Report`] or, for
//! `table1 --format csv`, the coincidence table itself.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

pub use args::{Cli, Command, Format};
pub use error::CliError;
