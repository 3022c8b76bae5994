use std::path::{Path, PathBuf};

use dta_core::sim::{run_match, MatchMetrics, Mode, SimConfig};
use dta_core::task_assignment::Role;
use serde::{Deserialize, Serialize};

use crate::{load_config, read, write_atomic, Error, Result};

/// A sweep over modes and seeds on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    /// Scenario file; relative paths are taken from the plan's directory.
    pub base_config: PathBuf,
    pub modes: Vec<Mode>,
    pub seeds: Vec<u64>,
    /// Where `runs.csv` and `report.json` go; relative like `base_config`.
    pub output_dir: PathBuf,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::Plan("at least one mode is required"));
        }
        if self.seeds.is_empty() {
            return Err(Error::Plan("at least one seed is required"));
        }
        Ok(())
    }
}

/// Reads a plan and makes its paths absolute.
pub fn load_plan(path: &Path) -> Result<ExperimentPlan> {
    let mut plan: ExperimentPlan = serde_json::from_str(&read(path)?).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    plan.base_config = dir.join(&plan.base_config);
    plan.output_dir = dir.join(&plan.output_dir);
    plan.validate()?;
    Ok(plan)
}

/// The numbers kept from one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub seed: u64,
    pub mode: Mode,
    /// Seconds of overlap, in `Role::ALL` order.
    pub overlap_s: Vec<f64>,
    pub packets_sent: u32,
    pub max_packet_len: usize,
    pub goals_for: u32,
    pub goals_against: u32,
}

impl MatchRecord {
    pub fn from_metrics(m: &MatchMetrics) -> Self {
        MatchRecord {
            seed: m.seed,
            mode: m.mode,
            overlap_s: Role::ALL.iter().map(|&r| m.overlap_s(r)).collect(),
            packets_sent: m.packets_sent,
            max_packet_len: m.max_packet_len,
            goals_for: m.goals_for,
            goals_against: m.goals_against,
        }
    }

    pub fn overlap(&self, role: Role) -> f64 {
        let i = Role::ALL.iter().position(|&r| r == role).expect("every role is listed");
        self.overlap_s[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleSummary {
    pub role: Role,
    pub mean_s: f64,
    pub min_s: f64,
    pub max_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: Mode,
    pub runs: usize,
    pub roles: Vec<RoleSummary>,
    pub mean_packets_sent: f64,
}

impl ModeSummary {
    pub fn role(&self, role: Role) -> Option<&RoleSummary> {
        self.roles.iter().find(|r| r.role == role)
    }
}

/// Everything an experiment produced, sorted by seed then mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub matches: Vec<MatchRecord>,
    /// One entry per mode, in `Mode::ALL` order.
    pub modes: Vec<ModeSummary>,
}

#[derive(Serialize)]
struct CsvRow {
    seed: u64,
    mode: Mode,
    role: Role,
    overlap_s: f64,
    packets_sent: u32,
}

impl Report {
    pub fn from_matches(mut matches: Vec<MatchRecord>) -> Self {
        matches.sort_by_key(|m| (m.seed, m.mode));
        let modes = Mode::ALL
            .iter()
            .filter_map(|&mode| {
                let runs: Vec<&MatchRecord> = matches.iter().filter(|m| m.mode == mode).collect();
                if runs.is_empty() {
                    return None;
                }
                let n = runs.len() as f64;
                let roles = Role::ALL
                    .iter()
                    .map(|&role| {
                        let values = runs.iter().map(|m| m.overlap(role));
                        RoleSummary {
                            role,
                            mean_s: values.clone().sum::<f64>() / n,
                            min_s: values.clone().fold(f64::INFINITY, f64::min),
                            max_s: values.fold(f64::NEG_INFINITY, f64::max),
                        }
                    })
                    .collect();
                Some(ModeSummary {
                    mode,
                    runs: runs.len(),
                    roles,
                    mean_packets_sent: runs.iter().map(|m| f64::from(m.packets_sent)).sum::<f64>() / n,
                })
            })
            .collect();
        Report { matches, modes }
    }

    pub fn mode(&self, mode: Mode) -> Option<&ModeSummary> {
        self.modes.iter().find(|m| m.mode == mode)
    }

    /// One row per (seed, mode, role): `seed,mode,role,overlap_s,packets_sent`.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for m in &self.matches {
            for (&role, &overlap_s) in Role::ALL.iter().zip(&m.overlap_s) {
                w.serialize(CsvRow {
                    seed: m.seed,
                    mode: m.mode,
                    role,
                    overlap_s,
                    packets_sent: m.packets_sent,
                })?;
            }
        }
        w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("reports serialize");
        out.push(b'\n');
        out
    }

    /// Writes `runs.csv` and `report.json` into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_atomic(&dir.join("runs.csv"), &self.to_csv()?)?;
        write_atomic(&dir.join("report.json"), &self.to_json())
    }
}

/// Plays every (mode, seed) pair of the plan on its scenario.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<Report> {
    plan.validate()?;
    let base = load_config(&plan.base_config)?;
    run_sweep(&base, &plan.modes, &plan.seeds)
}

/// Plays every (mode, seed) pair on `base`.
pub fn run_sweep(base: &SimConfig, modes: &[Mode], seeds: &[u64]) -> Result<Report> {
    let mut matches = Vec::with_capacity(modes.len() * seeds.len());
    for &seed in seeds {
        for &mode in modes {
            let config = SimConfig {
                seed,
                mode,
                ..base.clone()
            };
            matches.push(MatchRecord::from_metrics(&run_match(&config)?));
        }
    }
    Ok(Report::from_matches(matches))
}
