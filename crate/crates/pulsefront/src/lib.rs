//! Experiment runner for pulsating-front studies: TOML configs, the seven
//! experiments, and CSV/JSON/`.dat` output. The numerics live in
//! `pulsefront_core`.

pub mod config;
pub mod experiments;
pub mod formats;
pub mod table;

use std::path::PathBuf;

use pulsefront_core::ValidationReport;

pub use config::{ExperimentConfig, ExperimentKind, MediumSpec};
pub use table::Table;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("config syntax: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error(transparent)]
    Core(#[from] pulsefront_core::Error),
    #[error("medium {0:?}: {1}")]
    Medium(String, #[source] Box<Error>),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Grid resolution of `validate`.
pub const VALIDATE_NX: usize = 128;
pub const VALIDATE_NU: usize = 512;

/// Builds and validates every medium of a config; a medium passes when
/// (A1)-(A3) hold. (A4) is reported but optional.
pub fn validate_media(cfg: &ExperimentConfig) -> Result<Vec<(String, ValidationReport)>, Error> {
    Ok(cfg
        .build_media()?
        .into_iter()
        .map(|(name, m)| (name, m.validate(VALIDATE_NX, VALIDATE_NU)))
        .collect())
}

pub fn report_passes(r: &ValidationReport) -> bool {
    r.passed_a1 && r.passed_a2 && r.passed_a3
}
