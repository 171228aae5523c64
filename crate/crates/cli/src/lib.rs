//! Config files, command implementations and CSV output for the `wcdma-cac`
//! tool.

pub mod commands;
pub mod config;
pub mod csv_out;

pub use config::{ConfigError, Preset, Resolved, ScenarioConfig};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] wcdma_cac::Error),
    #[error("{0}")]
    Usage(String),
    #[error("CSV output: {0}")]
    Csv(#[from] csv::Error),
}
