//! Scaled-up data on nested horizons: each horizon is solved from scratch
//! until the first failure, and the growth curve is emitted either way.

use nsf_core::duhamel::heat_trajectory;
use nsf_core::picard::{blowup_sweep, OperatorConstants};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{config_err, forced_stage, load_params, status_label, LoadParams, Outcome};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::manifest::{Artifacts, RunStatus};
use crate::schema::GrowthRow;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Multiplier applied to the initial data.
    pub scale: f64,
    /// Number of nested horizons, spread over the positive sample times
    /// and always ending at the last one.
    #[serde(default = "default_horizons")]
    pub horizons: usize,
}

fn default_horizons() -> usize {
    5
}

impl LoadParams for Params {
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        if !(self.scale.is_finite() && self.scale != 0.0) {
            return Err(config_err("scale must be finite and nonzero"));
        }
        let positive = cfg.times()?.len() - 1;
        if self.horizons == 0 || self.horizons > positive {
            return Err(config_err(format!(
                "horizons must lie in [1, {positive}], got {}",
                self.horizons
            )));
        }
        Ok(())
    }
}

impl Params {
    pub fn load(cfg: &ScenarioConfig) -> Result<Self> {
        load_params(cfg)
    }
}

/// `count` sample times spread evenly by index, the last one included.
pub fn horizon_times(times: &[f64], count: usize) -> Vec<f64> {
    let m = times.len() - 1;
    let mut out: Vec<f64> = vec![];
    for i in 1..=count {
        let t = times[(i * m).div_ceil(count).max(1)];
        if out.last() != Some(&t) {
            out.push(t);
        }
    }
    out
}

pub fn run(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<Outcome> {
    let prm = Params::load(cfg)?;
    let grid = cfg.grid()?;
    let times = cfg.times()?;
    let solver = cfg.solver();
    let forced = forced_stage(cfg, art, &grid, &times, &solver)?;
    if !forced.converged() {
        return Ok(Outcome {
            status: RunStatus::NonConverged,
            summary: json!({"failed_stage": "forced", "forced": forced.stage}),
        });
    }
    let u0 = cfg.initial()?.build(&grid)?.scaled(prm.scale);
    let x1_norm = solver.norm()?.norm(&heat_trajectory(&u0, &times)?)?;
    let horizons = horizon_times(&times, prm.horizons);
    let constants: Option<OperatorConstants> = (!forced.uf.is_zero()).then_some(forced.drift);
    let (solves, report) = art.stage("sweep", |_| {
        Ok(blowup_sweep(
            &u0,
            &forced.uf,
            &horizons,
            &solver,
            constants.as_ref(),
        )?)
    })?;
    let rows: Vec<GrowthRow> = report
        .growth
        .iter()
        .map(|g| GrowthRow {
            horizon: g.horizon,
            norm: g.norm,
            status: match g.status {
                nsf_core::picard::SolveStatus::Converged => "converged",
                nsf_core::picard::SolveStatus::Diverged => "diverged",
                nsf_core::picard::SolveStatus::MaxIters => "max_iters",
            }
            .into(),
            from_failed_solve: g.from_failed_solve,
        })
        .collect();
    art.write_csv("growth.csv", &rows)?;
    let per_horizon: Vec<_> = solves
        .iter()
        .map(|s| json!({"horizon": s.horizon, "report": s.report}))
        .collect();
    art.write_json(
        "blowup.json",
        &json!({"report": report, "solves": per_horizon}),
    )?;
    let statuses: Vec<&str> = solves.iter().map(|s| status_label(&s.report)).collect();
    if report.flagged() {
        art.mark_last("flagged", report.flag_reason.clone());
    }
    Ok(Outcome {
        status: if report.flagged() {
            RunStatus::NonConverged
        } else {
            RunStatus::Ok
        },
        summary: json!({
            "scale": prm.scale,
            "x1_norm": x1_norm,
            "horizons": horizons,
            "statuses": statuses,
            "flagged": report.flagged(),
            "flagged_horizon": report.flagged_horizon,
            "flag_reason": report.flag_reason,
            "converged_curve_monotone": report.converged_curve_monotone(),
            "growth_points": rows.len(),
        }),
    })
}
