//! Library side of the command-line tool: configuration resolution,
//! subcommand implementations, and artifact writers. The binary in
//! `main.rs` is a thin argument-parsing shell over these.

pub mod commands;
pub mod config;
pub mod svg;
pub mod table;
