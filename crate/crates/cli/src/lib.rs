//! Experiment harness for random ±1-polytopes: configuration, CSV output,
//! subcommands and the verification suite.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;
