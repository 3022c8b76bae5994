//! File formats and experiment sweeps around the `dta-core` simulator.
//!
//! A scenario is a JSON [`SimConfig`](dta_core::sim::SimConfig); every key is
//! optional and falls back to the built-in default. An [`ExperimentPlan`]
//! names a scenario, the modes and the seeds to sweep, and where to write
//! the results.

mod compare;
mod config;
mod experiment;

use std::path::PathBuf;

pub use compare::{compare_modes, Verdict};
pub use config::{load_config, parse_config};
pub use experiment::{load_plan, run_experiment, run_sweep, ExperimentPlan, MatchRecord, ModeSummary, Report, RoleSummary};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Sim(#[from] dta_core::sim::SimError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid plan: {0}")]
    Plan(&'static str),
    #[error("comparing needs at least two modes, the report has {0}")]
    TooFewModes(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

fn read(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes next to `path` and renames, so readers never see half a file.
fn write_atomic(path: &std::path::Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}
