//! Difference/perturbation ratios `‖u_δ - u‖_𝕃 / ‖δe‖_{Ḃ^{s_p}_{p,p}}` for
//! data `u0 + δ e`, with `δ` relative to `‖u0‖_{Ḃ^{s_p}_{p,p}}`.

use nsf_core::picard::solve_perturbation;
use nsf_core::spaces::{besov_norm, BesovIndex};
use nsf_core::spectral::FieldRecipe;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{config_err, forced_stage, load_params, status_label, LoadParams, Outcome};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::manifest::{Artifacts, RunStatus};
use crate::schema::StabilityRow;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Perturbation direction `e`; normalized to unit critical norm.
    pub direction: FieldRecipe,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    /// Ratios count as bounded when `max/min` stays below this.
    #[serde(default = "two")]
    pub spread_limit: f64,
}

fn default_deltas() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1]
}
fn two() -> f64 {
    2.0
}

impl LoadParams for Params {
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(config_err("deltas must be finite and nonnegative"));
        }
        if !(self.spread_limit >= 1.0) {
            return Err(config_err("spread_limit must be >= 1"));
        }
        let e = self.direction.build(&cfg.grid()?)?;
        if e.is_zero() {
            return Err(config_err("perturbation direction is zero"));
        }
        Ok(())
    }
}

impl Params {
    pub fn load(cfg: &ScenarioConfig) -> Result<Self> {
        load_params(cfg)
    }
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
    let idx = BesovIndex::critical(solver.p)?;
    let u0 = cfg.initial()?.build(&grid)?;
    let u0_norm = besov_norm(&u0, &idx);
    let e = prm.direction.build(&grid)?;
    let e = e.scaled(1.0 / besov_norm(&e, &idx));
    let norm = solver.norm()?;
    let constants = (!forced.uf.is_zero()).then_some(forced.drift);
    let (base, rep) = art.stage("baseline", |_| {
        Ok(solve_perturbation(
            &u0,
            &forced.uf,
            &solver,
            constants.as_ref(),
            None,
        )?)
    })?;
    art.mark_last(status_label(&rep), None);
    if !rep.converged() {
        return Ok(Outcome {
            status: RunStatus::NonConverged,
            summary: json!({"failed_stage": "baseline", "status": status_label(&rep)}),
        });
    }
    let mut rows = vec![];
    for &d in &prm.deltas {
        let delta = d * u0_norm;
        let data = u0.add(&e.scaled(delta))?;
        let delta_norm = besov_norm(&e.scaled(delta), &idx);
        let (v, r) = art.stage(&format!("delta_{d:e}"), |_| {
            Ok(solve_perturbation(
                &data,
                &forced.uf,
                &solver,
                constants.as_ref(),
                None,
            )?)
        })?;
        art.mark_last(status_label(&r), None);
        let (diff_norm, ratio) = if r.converged() {
            let diff = norm.norm(&v.sub(&base)?)?;
            (Some(diff), (delta_norm > 0.0).then(|| diff / delta_norm))
        } else {
            (None, None)
        };
        rows.push(StabilityRow {
            delta_rel: d,
            delta_norm,
            diff_norm,
            ratio,
            status: status_label(&r).into(),
        });
    }
    art.write_csv("stability.csv", &rows)?;
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    let spread = if ratios.is_empty() {
        None
    } else {
        Some(hi / lo)
    };
    let bounded = spread.is_some_and(|s| s <= prm.spread_limit);
    let failed: Vec<f64> = rows
        .iter()
        .filter(|r| r.status != "converged")
        .map(|r| r.delta_rel)
        .collect();
    Ok(Outcome {
        status: if bounded {
            RunStatus::Ok
        } else {
            RunStatus::NonConverged
        },
        summary: json!({
            "u0_besov": u0_norm,
            "ratios": ratios,
            "spread": spread,
            "spread_limit": prm.spread_limit,
            "bounded": bounded,
            "regime_exit_deltas": failed,
        }),
    })
}
