//! Configuration-driven experiment runner on top of `cocycle-core`.
//!
//! Reads a JSON [`config::ExperimentConfig`], runs one experiment kind, and
//! writes comma-separated tables (header row, LF endings, floats with 17
//! significant digits) plus a `manifest.json` sidecar.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod format;
pub mod output;

pub use error::LabError;
