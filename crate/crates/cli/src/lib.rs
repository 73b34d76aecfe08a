//! Experiment harness for fair-capacitated clustering: synthetic data,
//! (method, k) sweeps, SVG reports and fairlet audits.

pub mod config;
pub mod exit;
pub mod generate;
pub mod report;
pub mod svg;
pub mod sweep;
pub mod validate;

pub use exit::{CliError, CliResult, Exit};
