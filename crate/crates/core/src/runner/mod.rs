//! Configuration and subcommands behind the `quasilocal` binary.

pub mod commands;
pub mod config;
pub mod validate;

pub use commands::*;
pub use config::*;
pub use validate::*;
