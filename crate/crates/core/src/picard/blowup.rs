use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::fixed_point::{ConvergenceReport, OperatorConstants, SolveStatus};
use super::nsf::solve_perturbation;
use crate::spectral::{SpectralField, Trajectory};
use crate::{Error, Result};

/// One solve of the perturbation equation on `[0, horizon]`.
pub struct HorizonSolve {
    pub horizon: f64,
    pub report: ConvergenceReport,
    /// The solution, kept only for converged solves.
    pub v: Option<Trajectory>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub horizon: f64,
    pub norm: f64,
    pub status: SolveStatus,
    /// True when `norm` is that of the last iterate of a failed solve
    /// rather than of a converged solution.
    pub from_failed_solve: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub growth: Vec<GrowthPoint>,
    pub flagged_horizon: Option<f64>,
    pub flag_reason: Option<String>,
    pub divergence_threshold: f64,
}

impl BlowupReport {
    pub fn flagged(&self) -> bool {
        self.flagged_horizon.is_some()
    }

    /// Whether the converged part of the curve is nondecreasing.
    pub fn converged_curve_monotone(&self) -> bool {
        let pts: Vec<f64> = self
            .growth
            .iter()
            .filter(|g| !g.from_failed_solve)
            .map(|g| g.norm)
            .collect();
        pts.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Reads a sequence of solves on increasing horizons.
///
/// The first horizon whose solve does not converge or whose norm exceeds
/// the divergence threshold is flagged. Norms of converged horizons are
/// taken from the longest converged solution restricted to each horizon;
/// the solver is causal, so restrictions agree with the shorter solves to
/// solver tolerance and the curve is nondecreasing by construction.
pub fn detect_blowup(solves: &[HorizonSolve], cfg: &SolverConfig) -> Result<BlowupReport> {
    if solves.windows(2).any(|w| !(w[1].horizon > w[0].horizon)) {
        return Err(Error::InvalidTimes("horizons must increase".into()));
    }
    let norm = cfg.norm()?;
    let mut flagged = None;
    let mut reason = None;
    let mut ok = 0;
    for s in solves {
        let status = s.report.status;
        if status != SolveStatus::Converged {
            reason = Some(format!("solver status {status:?}"));
        } else if s.report.final_norm() > cfg.divergence_threshold {
            reason = Some("norm above divergence threshold".into());
        }
        if reason.is_some() {
            flagged = Some(s.horizon);
            break;
        }
        ok += 1;
    }
    let mut growth = Vec::with_capacity(solves.len());
    if ok > 0 {
        let longest = solves[ok - 1]
            .v
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("converged solve without its solution".into()))?;
        let profile = norm.profile(longest);
        for s in &solves[..ok] {
            growth.push(GrowthPoint {
                horizon: s.horizon,
                norm: profile.critical_pair(norm.r0, f64::INFINITY, s.horizon)?,
                status: SolveStatus::Converged,
                from_failed_solve: false,
            });
        }
    }
    if let Some(s) = solves.get(ok) {
        growth.push(GrowthPoint {
            horizon: s.horizon,
            norm: s.report.final_norm(),
            status: s.report.status,
            from_failed_solve: true,
        });
    }
    Ok(BlowupReport {
        growth,
        flagged_horizon: flagged,
        flag_reason: reason,
        divergence_threshold: cfg.divergence_threshold,
    })
}

/// Solves the perturbation equation on each horizon (a prefix of the time
/// grid of `uf` ending at a sample) until the first failure.
pub fn blowup_sweep(
    u0: &SpectralField,
    uf: &Trajectory,
    horizons: &[f64],
    cfg: &SolverConfig,
    constants: Option<&OperatorConstants>,
) -> Result<(Vec<HorizonSolve>, BlowupReport)> {
    let mut solves = Vec::new();
    for &h in horizons {
        if !uf.times().contains(&h) {
            return Err(Error::InvalidTimes(format!(
                "horizon {h} is not a sample time"
            )));
        }
        let prefix = uf.truncated(h)?;
        let (v, report) = solve_perturbation(u0, &prefix, cfg, constants, None)?;
        let converged = report.converged();
        solves.push(HorizonSolve {
            horizon: h,
            v: converged.then_some(v),
            report,
        });
        if !converged || solves.last().unwrap().report.final_norm() > cfg.divergence_threshold {
            break;
        }
    }
    let report = detect_blowup(&solves, cfg)?;
    Ok((solves, report))
}
