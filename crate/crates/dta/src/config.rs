use std::path::Path;

use dta_core::sim::SimConfig;

use crate::{read, Error, Result};

/// Parses and validates a scenario. Missing keys take their defaults.
pub fn parse_config(json: &str) -> std::result::Result<SimConfig, ConfigError> {
    let config: SimConfig = serde_json::from_str(json)?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    parse_config(&read(path)?).map_err(|e| match e {
        ConfigError::Json(source) => Error::Json {
            path: path.to_path_buf(),
            source,
        },
        ConfigError::Sim(e) => Error::Sim(e),
    })
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sim(#[from] dta_core::sim::SimError),
}
