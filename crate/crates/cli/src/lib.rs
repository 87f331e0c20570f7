//! Library side of the `gbbm` binary: config layering, run directories,
//! the acceptance suite and the subcommand handlers.

pub mod commands;
pub mod config;
pub mod rundir;
pub mod verify;
