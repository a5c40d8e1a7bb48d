//! Scenario implementations and the common run driver.

use std::path::Path;

use nsf_core::duhamel::ForceSpec;
use nsf_core::picard::{
    compute_uf, drift_constants, ConvergenceReport, ForcedStage, OperatorConstants, SampleSpec,
    SolverConfig, TrajectoryNorms,
};
use nsf_core::spectral::{Grid, Trajectory};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::error::{LabError, Result};
use crate::manifest::{sha256_hex, Artifacts, RunManifest, RunStatus};
use crate::schema::{IterationRow, NormRow};

pub mod blowup;
pub mod decomposition;
pub mod gallery;
pub mod longtime;
pub mod scaling;
pub mod small_data;
pub mod stability;
pub mod weak_strong;

/// What a scenario hands back to the driver.
pub struct Outcome {
    pub status: RunStatus,
    /// Written to `summary.json`.
    pub summary: Value,
}

pub struct RunResult {
    pub manifest: RunManifest,
    pub summary: Option<Value>,
}

pub fn validate_params(cfg: &ScenarioConfig) -> Result<()> {
    match cfg.scenario {
        ScenarioKind::ScalingInvariance => scaling::Params::load(cfg).map(drop),
        ScenarioKind::SmallDataGlobal => small_data::Params::load(cfg).map(drop),
        ScenarioKind::BlowupSweep => blowup::Params::load(cfg).map(drop),
        ScenarioKind::DecompositionCheck => decomposition::Params::load(cfg).map(drop),
        ScenarioKind::LongtimeCalderon => longtime::Params::load(cfg).map(drop),
        ScenarioKind::StabilityPerturbation => stability::Params::load(cfg).map(drop),
        ScenarioKind::WeakStrongUniqueness => weak_strong::Params::load(cfg).map(drop),
        ScenarioKind::ForceGallery => gallery::Params::load(cfg).map(drop),
    }
}

/// Runs a validated configuration into `out_dir`. The manifest is written
/// on every path once the directory exists, including errors.
pub fn run(cfg: &ScenarioConfig, config_bytes: &[u8], out_dir: &Path) -> Result<RunResult> {
    let hash = sha256_hex(config_bytes);
    let mut art = Artifacts::create(out_dir)?;
    let res = match cfg.scenario {
        ScenarioKind::ScalingInvariance => scaling::run(cfg, &mut art),
        ScenarioKind::SmallDataGlobal => small_data::run(cfg, &mut art),
        ScenarioKind::BlowupSweep => blowup::run(cfg, &mut art),
        ScenarioKind::DecompositionCheck => decomposition::run(cfg, &mut art),
        ScenarioKind::LongtimeCalderon => longtime::run(cfg, &mut art),
        ScenarioKind::StabilityPerturbation => stability::run(cfg, &mut art),
        ScenarioKind::WeakStrongUniqueness => weak_strong::run(cfg, &mut art),
        ScenarioKind::ForceGallery => gallery::run(cfg, &mut art),
    };
    let name = cfg.scenario.name();
    match res {
        Ok(out) => {
            let written = art.write_json("summary.json", &out.summary);
            if let Err(e) = written {
                let msg = e.to_string();
                art.finish(name, &hash, cfg.seed, RunStatus::Error, Some(msg))?;
                return Err(e);
            }
            let manifest = art.finish(name, &hash, cfg.seed, out.status, None)?;
            Ok(RunResult {
                manifest,
                summary: Some(out.summary),
            })
        }
        Err(e) => {
            art.finish(name, &hash, cfg.seed, RunStatus::Error, Some(e.to_string()))?;
            Err(e)
        }
    }
}

/// Sample trajectories for the operator-constant estimates.
pub fn sample_spec(grid: &Grid, count: usize, seed: u64) -> SampleSpec {
    SampleSpec::for_grid(grid, count, seed)
}

/// `U_f` stage: forced solution plus the drift constant of `2B(U_f, ·)`.
pub struct Forced {
    pub uf: Trajectory,
    pub stage: ForcedStage,
    pub force: ForceSpec,
    pub drift: OperatorConstants,
}

impl Forced {
    pub fn converged(&self) -> bool {
        self.stage.report.converged()
    }
}

pub fn forced_stage(
    cfg: &ScenarioConfig,
    art: &mut Artifacts,
    grid: &Grid,
    times: &[f64],
    solver: &SolverConfig,
) -> Result<Forced> {
    let mut force = cfg.force();
    let (uf, stage) = art.stage("forced", |_| {
        Ok(compute_uf(&mut force, grid, times, solver)?)
    })?;
    if !stage.report.converged() {
        art.mark_last(
            status_label(&stage.report),
            Some("U_f did not converge".into()),
        );
    }
    let drift = art.stage("drift_constant", |_| {
        Ok(drift_constants(
            &uf,
            solver,
            &sample_spec(grid, 10, cfg.seed ^ 0x5eed),
        )?)
    })?;
    art.write_json("forced.json", &stage)?;
    Ok(Forced {
        uf,
        stage,
        force,
        drift,
    })
}

pub fn status_label(r: &ConvergenceReport) -> &'static str {
    match r.status {
        nsf_core::picard::SolveStatus::Converged => "converged",
        nsf_core::picard::SolveStatus::Diverged => "diverged",
        nsf_core::picard::SolveStatus::MaxIters => "max_iters",
    }
}

pub fn iteration_rows(r: &ConvergenceReport) -> Vec<IterationRow> {
    r.differences
        .iter()
        .enumerate()
        .map(|(i, d)| IterationRow {
            iteration: i + 1,
            norm: r.iterates_norms[i],
            difference: *d,
            ratio: i.checked_sub(1).map(|j| r.ratios[j]),
        })
        .collect()
}

pub fn norm_rows(n: &TrajectoryNorms, residual: Option<&[f64]>) -> Vec<NormRow> {
    (0..n.times.len())
        .map(|i| NormRow {
            t: n.times[i],
            weak_l3: n.weak_l3[i],
            besov_critical: n.critical_besov[i],
            l2: n.l2[i],
            mild_residual: residual.map(|r| r[i]),
        })
        .collect()
}

/// Largest finite value; `None` for an empty or non-finite series.
pub fn finite_max(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() || xs.iter().any(|x| !x.is_finite()) {
        return None;
    }
    Some(xs.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Common shape of `[params]` tables.
pub trait LoadParams: Sized + for<'de> Deserialize<'de> + Serialize {
    fn check(&self, _cfg: &ScenarioConfig) -> Result<()> {
        Ok(())
    }
}

pub fn load_params<T: LoadParams>(cfg: &ScenarioConfig) -> Result<T> {
    let p: T = cfg.params()?;
    p.check(cfg)?;
    Ok(p)
}

pub fn config_err(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

/// `‖u‖_{L^∞}` over the grid points.
pub fn sup_norm(u: &nsf_core::spectral::SpectralField) -> f64 {
    u.to_physical().magnitude().into_iter().fold(0.0, f64::max)
}
