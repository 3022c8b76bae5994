use dta_core::sim::Mode;
use dta_core::task_assignment::Role;
use serde::Serialize;

use crate::{Error, Report, Result};

/// Mean overlap of one role in every reported mode, and whether the means
/// fall (not necessarily strictly) from fixed rate to event based to event
/// based with Voronoi.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub role: Role,
    /// In `Mode::ALL` order.
    pub means: Vec<(Mode, f64)>,
    pub ordered: bool,
}

pub fn compare_modes(report: &Report) -> Result<Vec<Verdict>> {
    if report.modes.len() < 2 {
        return Err(Error::TooFewModes(report.modes.len()));
    }
    Ok(Role::ALL
        .iter()
        .map(|&role| {
            let means: Vec<(Mode, f64)> = report
                .modes
                .iter()
                .map(|m| (m.mode, m.role(role).map_or(0.0, |r| r.mean_s)))
                .collect();
            let ordered = means.windows(2).all(|w| w[1].1 <= w[0].1);
            Verdict { role, means, ordered }
        })
        .collect())
}
