//! Evaluates the `H/W/Z` expansion of a converged perturbation solution and
//! compares it with the solution.

use nsf_core::expansion::{perturbation_bindings, verify_decomposition, MAX_N};
use nsf_core::picard::solve_perturbation;
use nsf_core::spaces::{besov_norm, BesovIndex};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    config_err, forced_stage, iteration_rows, load_params, status_label, LoadParams, Outcome,
};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::manifest::{Artifacts, RunStatus};
use crate::schema::DecompositionRow;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_levels() -> Vec<usize> {
    vec![2, 3]
}
fn default_tol() -> f64 {
    1e-6
}

impl LoadParams for Params {
    fn check(&self, _cfg: &ScenarioConfig) -> Result<()> {
        if self.levels.is_empty() || self.levels.iter().any(|n| !(2..=MAX_N).contains(n)) {
            return Err(config_err(format!("levels must lie in [2, {MAX_N}]")));
        }
        if !(self.tol > 0.0) {
            return Err(config_err("tol must be positive"));
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
    let v0 = cfg.initial()?.build(&grid)?;
    let constants = (!forced.uf.is_zero()).then_some(forced.drift);
    let (v, report) = art.stage("perturbation", |_| {
        Ok(solve_perturbation(
            &v0,
            &forced.uf,
            &solver,
            constants.as_ref(),
            None,
        )?)
    })?;
    art.mark_last(status_label(&report), None);
    art.write_json("convergence.json", &report)?;
    art.write_csv("iterations.csv", &iteration_rows(&report))?;
    if !report.converged() {
        return Ok(Outcome {
            status: RunStatus::NonConverged,
            summary: json!({"failed_stage": "perturbation", "status": status_label(&report)}),
        });
    }
    let bindings = perturbation_bindings(&v0, &v, &forced.uf)?;
    let v0_besov = besov_norm(&v0, &BesovIndex::critical(solver.p)?);
    let mut rows = vec![];
    let mut reports = vec![];
    for &n in &prm.levels {
        let (dec, rep) = art.stage(&format!("level_{n}"), |_| {
            Ok(verify_decomposition(
                &v,
                &bindings,
                n,
                &solver.quadrature,
                prm.tol,
                solver.p,
            )?)
        })?;
        if !rep.passed {
            art.mark_last(
                "check_failed",
                Some(format!("residual {:.3e}", rep.residual)),
            );
        }
        art.write_bytes(&format!("terms_N{n}.txt"), dec.dump().as_bytes())?;
        let vals = dec
            .evaluated
            .as_ref()
            .expect("verification evaluates the buckets");
        let total = vals.h.add(&vals.w)?.add(&vals.z)?;
        let res = v.sub(&total)?;
        for (i, &t) in times.iter().enumerate() {
            rows.push(DecompositionRow {
                n,
                t,
                v_l2: v.state(i).l2_norm(),
                h_l2: vals.h.state(i).l2_norm(),
                w_l2: vals.w.state(i).l2_norm(),
                z_l2: vals.z.state(i).l2_norm(),
                residual_l2: res.state(i).l2_norm(),
            });
        }
        reports.push(json!({
            "report": rep,
            "kato_constant": if v0_besov > 0.0 { Some(rep.h_kato / v0_besov) } else { None },
        }));
    }
    art.write_csv("decomposition.csv", &rows)?;
    art.write_json("decomposition.json", &reports)?;
    let passed = reports.iter().all(|r| r["report"]["passed"] == json!(true));
    Ok(Outcome {
        status: if passed {
            RunStatus::Ok
        } else {
            RunStatus::NonConverged
        },
        summary: json!({
            "levels": prm.levels,
            "tol": prm.tol,
            "passed": passed,
            "fixed_point_residual": report.residual,
            "residuals": reports.iter().map(|r| r["report"]["residual"].clone()).collect::<Vec<_>>(),
            "v0_besov": v0_besov,
        }),
    })
}
