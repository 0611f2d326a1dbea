//! Command-line companion to the core engine: configuration, deterministic
//! sampling, an expression grammar over the ambient field, check suites,
//! and report rendering. The binary in `main.rs` is a thin wrapper over
//! `commands`.

pub mod commands;
pub mod config;
pub mod exprtext;
pub mod report;
pub mod sample;
pub mod suites;
