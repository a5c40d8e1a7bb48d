//! Picard solve of small data with the measured `γ`, plus nested-horizon
//! growth of the solution.

use nsf_core::duhamel::{force_response, heat_trajectory};
use nsf_core::picard::{
    estimate_operator_constants, mild_residual, solve_perturbation, NsBilinear, OperatorConstants,
    SampleSpec, TrajectoryNorms, ZeroOperator,
};
use nsf_core::spectral::Trajectory;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    config_err, finite_max, forced_stage, iteration_rows, load_params, norm_rows, sample_spec,
    status_label, LoadParams, Outcome,
};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::manifest::{Artifacts, RunStatus};
use crate::schema::GrowthRow;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Rescale the data so that `‖e^{tΔ}u0‖ = fraction · (1-λ)²/(4γ)`.
    #[serde(default)]
    pub radius_fraction: Option<f64>,
    #[serde(default = "ten")]
    pub gamma_samples: usize,
    /// Wavenumber band `[k_lo, k_hi]` of the random `γ` samples; the heat
    /// flow of the data is always added to them.
    #[serde(default)]
    pub gamma_band: Option<[f64; 2]>,
}

fn ten() -> usize {
    10
}

impl LoadParams for Params {
    fn check(&self, _cfg: &ScenarioConfig) -> Result<()> {
        if self.radius_fraction.is_some_and(|f| !(f > 0.0)) {
            return Err(config_err("radius_fraction must be positive"));
        }
        if self.gamma_samples < 10 {
            return Err(config_err("gamma_samples must be at least 10"));
        }
        if self
            .gamma_band
            .is_some_and(|[lo, hi]| !(lo > 0.0 && hi >= lo))
        {
            return Err(config_err("gamma_band needs 0 < k_lo <= k_hi"));
        }
        Ok(())
    }
}

impl Params {
    pub fn load(cfg: &ScenarioConfig) -> Result<Self> {
        load_params(cfg)
    }
}

/// Growth curve `T ↦ ‖v‖_{𝕃(T)}` over the positive sample times.
pub fn growth_rows(v: &Trajectory, cfg: &nsf_core::picard::SolverConfig) -> Result<Vec<GrowthRow>> {
    let norm = cfg.norm()?;
    let profile = norm.profile(v);
    v.times()
        .iter()
        .filter(|t| **t > 0.0)
        .map(|&h| {
            Ok(GrowthRow {
                horizon: h,
                norm: profile.critical_pair(norm.r0, f64::INFINITY, h)?,
                status: "converged".into(),
                from_failed_solve: false,
            })
        })
        .collect()
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
    let mut u0 = cfg.initial()?.build(&grid)?;
    let data_flow = heat_trajectory(&u0, &times)?;
    let spec = match prm.gamma_band {
        Some([k_lo, k_hi]) => SampleSpec {
            count: prm.gamma_samples,
            k_lo,
            k_hi,
            seed: cfg.seed,
        },
        None => sample_spec(&grid, prm.gamma_samples, cfg.seed),
    };
    let gamma = art.stage("gamma", |_| {
        let mut samples = spec.trajectories(&grid, &times)?;
        samples.push(data_flow.clone());
        let b = NsBilinear::new(solver.quadrature);
        Ok(estimate_operator_constants(
            &ZeroOperator,
            &b,
            &solver,
            &samples,
        )?)
    })?;
    let constants = OperatorConstants {
        gamma: gamma.gamma,
        lambda: forced.drift.lambda,
        bilinear_samples: gamma.bilinear_samples,
        linear_samples: forced.drift.linear_samples,
    };
    art.write_json("constants.json", &constants)?;

    let norm = solver.norm()?;
    let x1_norm = norm.norm(&data_flow)?;
    let radius = (1.0 - constants.lambda).powi(2) / (4.0 * constants.gamma);
    if let Some(frac) = prm.radius_fraction {
        if x1_norm == 0.0 {
            return Err(config_err("cannot rescale zero initial data"));
        }
        u0.scale(frac * radius / x1_norm);
    }
    let (v, report) = art.stage("perturbation", |_| {
        Ok(solve_perturbation(
            &u0,
            &forced.uf,
            &solver,
            Some(&constants),
            None,
        )?)
    })?;
    art.mark_last(status_label(&report), None);
    art.write_json("convergence.json", &report)?;
    art.write_csv("iterations.csv", &iteration_rows(&report))?;
    if !report.converged() {
        return Ok(Outcome {
            status: RunStatus::NonConverged,
            summary: json!({
                "status": status_label(&report),
                "gamma": constants.gamma,
                "lambda": constants.lambda,
                "radius": radius,
                "x1_norm": report.x1_norm,
            }),
        });
    }
    let u = forced.uf.add(&v)?;
    let (residual, norms) = art.stage("diagnostics", |_| {
        let response = force_response(&forced.force, &grid, &times, &solver.quadrature)?;
        let residual = mild_residual(&u, &u0, &response, &solver)?;
        Ok((residual, TrajectoryNorms::of(&u, solver.p)?))
    })?;
    art.write_csv("norms.csv", &norm_rows(&norms, Some(&residual)))?;
    let growth = growth_rows(&v, &solver)?;
    art.write_csv("growth.csv", &growth)?;
    let max_residual = finite_max(&residual);
    let small = report.small_data;
    Ok(Outcome {
        status: RunStatus::Ok,
        summary: json!({
            "status": status_label(&report),
            "iterations": report.iterations,
            "gamma": constants.gamma,
            "lambda": constants.lambda,
            "radius": radius,
            "x1_norm": report.x1_norm,
            "solution_norm": norm.norm(&v)?,
            "max_ratio_from_3": report.ratios.iter().skip(1).copied().fold(0.0, f64::max),
            "fixed_point_residual": report.residual,
            "max_mild_residual": max_residual,
            "small_data": small,
            "kato": norms.kato,
            "weak_l3_sup": finite_max(&norms.weak_l3),
        }),
    })
}
