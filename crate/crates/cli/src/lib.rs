//! File formats, configuration and subcommands behind the `diskcert` binary.

pub mod certificate;
pub mod commands;
pub mod config;
pub mod formats;
