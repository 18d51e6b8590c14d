//! Command-line companion to `qslbattery-core`: run configuration, parallel
//! trajectory sweeps, CSV output, figure presets and regime reports.

pub mod config;
pub mod error;
pub mod figure;
pub mod output;
pub mod report;
pub mod sweep;

pub use config::RunConfig;
pub use error::{AppError, ConfigError};
