//! Critical Besov norm before and after the dilation `u ↦ λu(λx)` on
//! matched grids.

use nsf_core::spaces::{besov_norm, BesovIndex};
use nsf_core::spectral::{random_divfree, rescale_matched};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{config_err, load_params, LoadParams, Outcome};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::manifest::{Artifacts, RunStatus};
use crate::schema::ScalingRow;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "default_fields")]
    pub fields: usize,
    #[serde(default = "default_ps")]
    pub p_values: Vec<f64>,
    /// `λ = 2^m`.
    #[serde(default = "one")]
    pub lambda_exponent: i32,
    #[serde(default = "one_f")]
    pub k_lo: f64,
    #[serde(default = "default_k_hi")]
    pub k_hi: f64,
    #[serde(default)]
    pub slope: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_fields() -> usize {
    20
}
fn default_ps() -> Vec<f64> {
    vec![4.0, 6.0]
}
fn one() -> i32 {
    1
}
fn one_f() -> f64 {
    1.0
}
fn default_k_hi() -> f64 {
    12.0
}
fn default_tol() -> f64 {
    1e-10
}

impl LoadParams for Params {
    fn check(&self, _cfg: &ScenarioConfig) -> Result<()> {
        if self.fields == 0 || self.p_values.is_empty() {
            return Err(config_err("scaling needs at least one field and one p"));
        }
        if self.p_values.iter().any(|p| !(*p >= 1.0)) {
            return Err(config_err("scaling p values must be >= 1"));
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
    let lambda = 2f64.powi(prm.lambda_exponent);
    let rows = art.stage("norms", |_| {
        let mut rows = vec![];
        for i in 0..prm.fields {
            let u = random_divfree(
                &grid,
                prm.k_lo,
                prm.k_hi,
                prm.slope,
                cfg.seed.wrapping_add(i as u64),
                true,
            );
            let r = rescale_matched(&u, prm.lambda_exponent)?;
            for &p in &prm.p_values {
                let idx = BesovIndex::critical(p)?;
                let a = besov_norm(&u, &idx);
                let b = besov_norm(&r, &idx);
                rows.push(ScalingRow {
                    sample: i,
                    p,
                    lambda,
                    norm_original: a,
                    norm_rescaled: b,
                    rel_gap: (b - a).abs() / a,
                });
            }
        }
        Ok(rows)
    })?;
    art.write_csv("scaling.csv", &rows)?;
    let max_gap = rows.iter().map(|r| r.rel_gap).fold(0.0, f64::max);
    let passed = rows.iter().all(|r| r.rel_gap.is_finite()) && max_gap <= prm.tol;
    Ok(Outcome {
        status: if passed {
            RunStatus::Ok
        } else {
            RunStatus::NonConverged
        },
        summary: json!({
            "fields": prm.fields,
            "p_values": prm.p_values,
            "lambda": lambda,
            "max_rel_gap": max_gap,
            "tol": prm.tol,
            "passed": passed,
        }),
    })
}
