//! Config parsing and command bodies behind the `screening` binary.

pub mod commands;
pub mod config;
