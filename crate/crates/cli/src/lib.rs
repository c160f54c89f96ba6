//! Command-line front end for `hvlab`.
//!
//! Every subcommand is an [`experiments::Experiment`] producing
//! [`report::ReportRow`]s; `verify-all` runs the standard registry.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod report;

pub use cli::run;
