//! Library side of the `purify` binary: experiment files, CSV output and the
//! subcommand bodies.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
