//! `𝒴` norms and forced solutions `U_f = NSf(0)` for a list of forces, plus
//! the `𝒴` norm of the Gaussian point-force surrogate across widths.

use nsf_core::duhamel::{y_norm, ForceKind, ForceSpec};
use nsf_core::picard::compute_uf;
use nsf_core::spaces::weak_l3;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{config_err, load_params, status_label, LoadParams, Outcome};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::manifest::{Artifacts, RunStatus};
use crate::schema::{DiracRow, GalleryRow, SeriesRow};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryForce {
    pub name: String,
    pub force: ForceSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracSweep {
    pub amplitude: f64,
    pub direction: [f64; 3],
    pub widths: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub forces: Vec<GalleryForce>,
    #[serde(default)]
    pub dirac: Option<DiracSweep>,
}

impl LoadParams for Params {
    fn check(&self, _cfg: &ScenarioConfig) -> Result<()> {
        if self.forces.is_empty() && self.dirac.is_none() {
            return Err(config_err("force_gallery needs forces or a dirac sweep"));
        }
        let mut names: Vec<&str> = self.forces.iter().map(|f| f.name.as_str()).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(config_err("force names must be unique"));
        }
        for f in &self.forces {
            f.force.validate()?;
        }
        if let Some(d) = &self.dirac {
            if d.widths.is_empty() || d.widths.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
                return Err(config_err("dirac widths must be positive"));
            }
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
    let mut rows = vec![];
    let mut series = vec![];
    let mut details = serde_json::Map::new();
    for gf in &prm.forces {
        let mut force = gf.force.clone();
        let res = art.stage(&format!("force_{}", gf.name), |_| {
            Ok(compute_uf(&mut force, &grid, &times, &solver)?)
        });
        match res {
            Ok((uf, stage)) => {
                let ok = stage.report.converged();
                art.mark_last(status_label(&stage.report), None);
                let y = stage.y_norm.value;
                rows.push(GalleryRow {
                    name: gf.name.clone(),
                    y_norm: y,
                    saturated: stage.y_norm.saturated,
                    status: status_label(&stage.report).into(),
                    weak_l3_sup: ok.then_some(stage.weak_l3_sup),
                    bound_ratio: (ok && y > 0.0).then(|| stage.weak_l3_sup / (2.0 * y)),
                    bound_holds: ok.then_some(stage.bound_holds),
                });
                if ok {
                    for (t, s) in uf.times().iter().zip(uf.states()) {
                        series.push(SeriesRow {
                            name: gf.name.clone(),
                            t: *t,
                            weak_l3_uf: weak_l3(s),
                        });
                    }
                }
                details.insert(gf.name.clone(), serde_json::to_value(&stage)?);
            }
            Err(e) => {
                rows.push(GalleryRow {
                    name: gf.name.clone(),
                    y_norm: f64::NAN,
                    saturated: false,
                    status: "error".into(),
                    weak_l3_sup: None,
                    bound_ratio: None,
                    bound_holds: None,
                });
                details.insert(gf.name.clone(), json!({"error": e.to_string()}));
            }
        }
    }
    if !prm.forces.is_empty() {
        art.write_csv("gallery.csv", &rows)?;
        art.write_csv("gallery_series.csv", &series)?;
        art.write_json("gallery.json", &Value::Object(details))?;
    }
    let mut sweep = vec![];
    if let Some(d) = &prm.dirac {
        sweep = art.stage("dirac_sweep", |_| {
            d.widths
                .iter()
                .map(|&w| {
                    let mut f = ForceSpec::new(ForceKind::ScaledDiracSurrogate {
                        amplitude: d.amplitude,
                        width: w,
                        direction: d.direction,
                        center: None,
                    });
                    let r = y_norm(&mut f, &grid, &times, &solver.quadrature)?;
                    Ok(DiracRow {
                        width: w,
                        y_norm: r.value,
                        saturated: r.saturated,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })?;
        art.write_csv("dirac_sweep.csv", &sweep)?;
    }
    let all_hold = rows.iter().all(|r| r.bound_holds != Some(false));
    let any_failed = rows.iter().any(|r| r.status != "converged");
    Ok(Outcome {
        status: if any_failed {
            RunStatus::NonConverged
        } else {
            RunStatus::Ok
        },
        summary: json!({
            "forces": rows.iter().map(|r| json!({
                "name": r.name,
                "y_norm": if r.y_norm.is_finite() { json!(r.y_norm) } else { Value::Null },
                "status": r.status,
                "bound_ratio": r.bound_ratio,
                "bound_holds": r.bound_holds,
            })).collect::<Vec<_>>(),
            "all_bounds_hold": all_hold,
            "dirac_sweep": sweep.iter().map(|r| json!({"width": r.width, "y_norm": r.y_norm})).collect::<Vec<_>>(),
        }),
    })
}
