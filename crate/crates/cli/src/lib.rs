#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Command-line workflows over the `epx` core: scans, EP location, contour
//! traces, monodromy and absorption maps, written as CSV and JSON.

pub mod args;
pub mod commands;
pub mod error;

pub use args::Cli;
pub use commands::run;
pub use error::CliError;
