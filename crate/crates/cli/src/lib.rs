//! Library half of the `jlbound` command-line tool.

pub mod commands;
pub mod grid;
pub mod table;
