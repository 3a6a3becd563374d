//! Configuration, commands and CSV output for the `afrelay` binary.

pub mod bussgang;
pub mod config;
pub mod figures;
pub mod report;
pub mod validate;
