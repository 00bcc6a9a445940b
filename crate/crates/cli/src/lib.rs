//! File handling, reports and subcommands behind the `ndasm` binary.

pub mod commands;
pub mod files;
pub mod report;
