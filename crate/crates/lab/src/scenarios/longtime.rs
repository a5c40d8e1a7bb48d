//! Small critical data plus a finite-energy bump, run to long times.
//!
//! `ū` solves from the small part alone and `u_f` from the full data, both
//! with the same force; `ω = u_f - ū` carries the bump. Nested horizons are
//! read off the single long solve, which is causal.

use nsf_core::duhamel::{force_response, heat_trajectory};
use nsf_core::picard::{mild_residual, solve_perturbation};
use nsf_core::spaces::weak_l3;
use nsf_core::spectral::FieldRecipe;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::small_data::growth_rows;
use super::{
    config_err, finite_max, forced_stage, load_params, status_label, sup_norm, LoadParams, Outcome,
};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::manifest::{Artifacts, RunStatus};
use crate::schema::LongtimeRow;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Finite-energy part of the data; `[initial]` is the small part.
    pub bump: FieldRecipe,
    /// Multiplies the measured `Kε` before it enters the exponent.
    #[serde(default = "one")]
    pub epsilon_factor: f64,
}

fn one() -> f64 {
    1.0
}

impl LoadParams for Params {
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        if !(self.epsilon_factor >= 0.0 && self.epsilon_factor.is_finite()) {
            return Err(config_err("epsilon_factor must be finite and nonnegative"));
        }
        self.bump.build(&cfg.grid()?)?;
        Ok(())
    }
}

impl Params {
    pub fn load(cfg: &ScenarioConfig) -> Result<Self> {
        load_params(cfg)
    }
}

/// Reference time and comparison curve `‖ω(t0)‖² (t/t0)^e` for `t >= t0`.
///
/// `t0` is the later of the energy peak and the first positive sample.
pub fn gronwall_curve(times: &[f64], energy: &[f64], exponent: f64) -> (usize, Vec<Option<f64>>) {
    let peak = energy
        .iter()
        .enumerate()
        .fold(0, |best, (i, e)| if *e > energy[best] { i } else { best });
    let i0 = peak.max(1);
    let (t0, e0) = (times[i0], energy[i0]);
    let curve = times
        .iter()
        .enumerate()
        .map(|(i, &t)| (i >= i0).then(|| e0 * (t / t0).powf(exponent)))
        .collect();
    (i0, curve)
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
    let small = cfg.initial()?.build(&grid)?;
    let bump = prm.bump.build(&grid)?;
    let full = small.add(&bump)?;
    let constants = (!forced.uf.is_zero()).then_some(forced.drift);
    let mut solve = |label: &str, data: &nsf_core::spectral::SpectralField| {
        let out = art.stage(label, |_| {
            Ok(solve_perturbation(
                data,
                &forced.uf,
                &solver,
                constants.as_ref(),
                None,
            )?)
        });
        if let Ok((_, r)) = &out {
            art.mark_last(status_label(r), None);
            let _ = art.write_json(&format!("convergence_{label}.json"), r);
        }
        out
    };
    let (vbar, rep_bar) = solve("small", &small)?;
    let (v, rep_full) = solve("full", &full)?;
    if !rep_bar.converged() || !rep_full.converged() {
        return Ok(Outcome {
            status: RunStatus::NonConverged,
            summary: json!({
                "small": status_label(&rep_bar),
                "full": status_label(&rep_full),
            }),
        });
    }
    let u = forced.uf.add(&v)?;
    let omega = v.sub(&vbar)?;
    let weak: Vec<f64> = u.states().iter().map(weak_l3).collect();
    let energy: Vec<f64> = omega.l2_series().iter().map(|x| x * x).collect();

    let heat = heat_trajectory(&small, &times)?;
    let k_eps = times
        .iter()
        .zip(heat.states())
        .map(|(t, s)| t.sqrt() * sup_norm(s))
        .fold(0.0, f64::max)
        * prm.epsilon_factor;
    let exponent = k_eps * k_eps;
    let (i0, curve) = gronwall_curve(&times, &energy, exponent);
    let monotone_after_peak = energy[i0..].windows(2).all(|w| w[1] <= w[0]);
    let dominated = (i0..times.len()).all(|i| energy[i] <= curve[i].unwrap_or(f64::INFINITY));
    let rows: Vec<LongtimeRow> = (0..times.len())
        .map(|i| LongtimeRow {
            t: times[i],
            weak_l3_uf: weak[i],
            l2_omega: energy[i].sqrt(),
            gronwall_bound: curve[i],
        })
        .collect();
    art.write_csv("longtime.csv", &rows)?;
    art.write_csv("growth.csv", &growth_rows(&v, &solver)?)?;
    let response = force_response(&forced.force, &grid, &times, &solver.quadrature)?;
    let residual = mild_residual(&u, &full, &response, &solver)?;
    let m = finite_max(&weak);
    Ok(Outcome {
        status: if monotone_after_peak && dominated && m.is_some() {
            RunStatus::Ok
        } else {
            RunStatus::NonConverged
        },
        summary: json!({
            "empirical_M": m,
            "t0": times[i0],
            "peak_index": i0,
            "K_eps": k_eps,
            "exponent": exponent,
            "monotone_after_peak": monotone_after_peak,
            "gronwall_dominates": dominated,
            "omega0_L2": bump.l2_norm(),
            "max_mild_residual": finite_max(&residual),
            "y_norm": forced.stage.y_norm.value,
        }),
    })
}
