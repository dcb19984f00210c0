//! Command-line front end for `zaklat`: JSON run configs with dotted
//! overrides, CSV/JSON outputs and a built-in verification suite.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

pub use config::RunConfig;
pub use error::CliError;
