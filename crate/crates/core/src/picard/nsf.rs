use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::fixed_point::{
    estimate_operator_constants, solve_fixed_point, ConvergenceReport, OperatorConstants,
    SampleSpec, SolveStatus,
};
use super::operators::{DriftOperator, LinearOperator, NsBilinear, ZeroOperator};
use crate::duhamel::force::y_norm_of_response;
use crate::duhamel::{bilinear_b, force_response, heat_trajectory, ForceSpec, YNormReport};
use crate::spaces::{besov_norm, kato_norm, weak_l3, BesovIndex};
use crate::spectral::{Grid, SpectralField, Trajectory};
use crate::{Error, Result};

/// Refusal level for the drift constant.
pub const LAMBDA_REFUSAL: f64 = 0.95;

/// `U_f` together with the checks made on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcedStage {
    pub report: ConvergenceReport,
    pub y_norm: YNormReport,
    pub weak_l3_sup: f64,
    /// `sup_t ‖U_f‖_{L^{3,∞}} <= 2‖f‖_𝒴 (1 + bound_tol)`; only meaningful
    /// when converged.
    pub bound_holds: bool,
    pub budget_exceeded: bool,
}

/// `U_f = NSf(0)`: solves `x = ∫e^{(t-s)Δ}Pf ds + B(x, x)`.
pub fn compute_uf(
    force: &mut ForceSpec,
    grid: &Grid,
    times: &[f64],
    cfg: &SolverConfig,
) -> Result<(Trajectory, ForcedStage)> {
    let response = force_response(force, grid, times, &cfg.quadrature)?;
    let yn = y_norm_of_response(&response);
    force.y_norm = Some(yn.value);
    let budget_exceeded = cfg.smallness_budget.is_some_and(|b| yn.value > b);
    let bilinear = NsBilinear::new(cfg.quadrature);
    let (uf, report) = solve_fixed_point(&response, &ZeroOperator, &bilinear, cfg, None)?;
    let weak_l3_sup = uf.states().par_iter().map(weak_l3).reduce(|| 0.0, f64::max);
    let bound_holds = report.converged() && weak_l3_sup <= 2.0 * yn.value * (1.0 + cfg.bound_tol);
    Ok((
        uf,
        ForcedStage {
            report,
            y_norm: yn,
            weak_l3_sup,
            bound_holds,
            budget_exceeded,
        },
    ))
}

/// Drift constant `λ` of `v ↦ 2B(U_f, v)` with `U_f` frozen.
pub fn drift_constants(
    uf: &Trajectory,
    cfg: &SolverConfig,
    samples: &SampleSpec,
) -> Result<OperatorConstants> {
    let drift = DriftOperator {
        drift: uf.clone(),
        quadrature: cfg.quadrature,
    };
    if drift.is_zero() {
        return Ok(OperatorConstants {
            gamma: 0.0,
            lambda: 0.0,
            bilinear_samples: 0,
            linear_samples: 0,
        });
    }
    let traj = samples.trajectories(uf.grid(), uf.times())?;
    let norm = cfg.norm()?;
    let mut lambda: f64 = 0.0;
    let mut used = 0;
    for s in &traj {
        let n = norm.norm(s)?;
        if n > 0.0 {
            lambda = lambda.max(norm.norm(&drift.apply(s)?)? / n);
            used += 1;
        }
    }
    Ok(OperatorConstants {
        gamma: 0.0,
        lambda,
        bilinear_samples: 0,
        linear_samples: used,
    })
}

/// Solves `v = e^{tΔ}u0 + B(v, v) + 2B(U_f, v)`.
///
/// `constants` supplies `γ` and `λ` for the report; its `λ` decides the
/// refusal. Without it `λ` is estimated from `samples` first.
pub fn solve_perturbation(
    u0: &SpectralField,
    uf: &Trajectory,
    cfg: &SolverConfig,
    constants: Option<&OperatorConstants>,
    samples: Option<&SampleSpec>,
) -> Result<(Trajectory, ConvergenceReport)> {
    if u0.divergence_defect() > 1e-10 {
        return Err(Error::InvalidConfig(
            "initial data is not divergence-free".into(),
        ));
    }
    if u0.coefficient(0).iter().any(|z| z.norm() != 0.0) {
        return Err(Error::InvalidConfig(
            "initial data must have zero mean".into(),
        ));
    }
    let estimated;
    let constants = match constants {
        Some(c) => Some(c),
        None if uf.is_zero() => None,
        None => {
            let spec = samples
                .copied()
                .unwrap_or_else(|| SampleSpec::for_grid(uf.grid(), 10, 17));
            estimated = drift_constants(uf, cfg, &spec)?;
            Some(&estimated)
        }
    };
    if let Some(c) = constants {
        if c.lambda >= LAMBDA_REFUSAL {
            return Err(Error::Refused(format!(
                "drift constant λ = {:.3} is not below {LAMBDA_REFUSAL}",
                c.lambda
            )));
        }
    }
    let x1 = heat_trajectory(u0, uf.times())?;
    let drift = DriftOperator {
        drift: uf.clone(),
        quadrature: cfg.quadrature,
    };
    let bilinear = NsBilinear::new(cfg.quadrature);
    solve_fixed_point(&x1, &drift, &bilinear, cfg, constants)
}

/// Per-time diagnostics of a velocity trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryNorms {
    pub times: Vec<f64>,
    pub weak_l3: Vec<f64>,
    pub critical_besov: Vec<f64>,
    pub l2: Vec<f64>,
    pub kato: f64,
}

impl TrajectoryNorms {
    pub fn of(u: &Trajectory, p: f64) -> Result<Self> {
        let idx = BesovIndex::critical(p)?;
        let per: Vec<(f64, f64, f64)> = u
            .states()
            .par_iter()
            .map(|s| (weak_l3(s), besov_norm(s, &idx), s.l2_norm()))
            .collect();
        Ok(Self {
            times: u.times().to_vec(),
            weak_l3: per.iter().map(|x| x.0).collect(),
            critical_besov: per.iter().map(|x| x.1).collect(),
            l2: per.iter().map(|x| x.2).collect(),
            kato: kato_norm(u, p)?,
        })
    }
}

/// `‖res(t)‖_{L^2} / sup_s ‖u(s)‖_{L^2}` at every sample, where
/// `res = u - e^{tΔ}u0 - ∫e^{(t-s)Δ}Pf ds - B(u, u)`.
pub fn mild_residual(
    u: &Trajectory,
    u0: &SpectralField,
    response: &Trajectory,
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let rhs = heat_trajectory(u0, u.times())?
        .add(response)?
        .add(&bilinear_b(u, u, &cfg.quadrature)?)?;
    let res = u.sub(&rhs)?;
    let scale = u.sup_l2();
    Ok(res
        .l2_series()
        .into_iter()
        .map(|r| if scale > 0.0 { r / scale } else { r })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsfReport {
    pub forced: ForcedStage,
    /// Absent when the forced stage failed.
    pub perturbation: Option<ConvergenceReport>,
    /// Label of the first stage that did not converge.
    pub failed_stage: Option<String>,
    pub residual: Vec<f64>,
    pub max_residual: Option<f64>,
    pub norms: Option<TrajectoryNorms>,
}

impl NsfReport {
    pub fn converged(&self) -> bool {
        self.failed_stage.is_none()
    }
}

pub struct NsfSolution {
    pub uf: Trajectory,
    /// `U_f = NSf(0)`.
    pub forced: Trajectory,
    /// `v = u_f - U_f`.
    pub v: Trajectory,
    pub report: NsfReport,
}

/// `u_f = U_f + v` with `U_f = NSf(0)` and `v` from the perturbation
/// equation; the assembled field is checked against the mild equation.
pub fn solve_nsf(
    u0: &SpectralField,
    force: &mut ForceSpec,
    times: &[f64],
    cfg: &SolverConfig,
    constants: Option<&OperatorConstants>,
) -> Result<NsfSolution> {
    let grid = *u0.grid();
    let (big_u, forced) = compute_uf(force, &grid, times, cfg)?;
    let zero = Trajectory::zeros(grid, times.to_vec())?;
    if !forced.report.converged() {
        return Ok(NsfSolution {
            uf: big_u.clone(),
            forced: big_u,
            v: zero,
            report: NsfReport {
                forced,
                perturbation: None,
                failed_stage: Some("forced".into()),
                residual: vec![],
                max_residual: None,
                norms: None,
            },
        });
    }
    let (v, pert) = solve_perturbation(u0, &big_u, cfg, constants, None)?;
    let uf = big_u.add(&v)?;
    let mut report = NsfReport {
        forced,
        perturbation: None,
        failed_stage: None,
        residual: vec![],
        max_residual: None,
        norms: None,
    };
    if pert.status != SolveStatus::Converged {
        report.failed_stage = Some("perturbation".into());
        report.perturbation = Some(pert);
        return Ok(NsfSolution {
            uf,
            forced: big_u,
            v,
            report,
        });
    }
    report.perturbation = Some(pert);
    let response = force_response(force, &grid, times, &cfg.quadrature)?;
    report.residual = mild_residual(&uf, u0, &response, cfg)?;
    report.max_residual = Some(report.residual.iter().copied().fold(0.0, f64::max));
    report.norms = Some(TrajectoryNorms::of(&uf, cfg.p)?);
    Ok(NsfSolution {
        uf,
        forced: big_u,
        v,
        report,
    })
}

/// Single Picard solve of the full mild equation,
/// `u = e^{tΔ}u0 + ∫e^{(t-s)Δ}Pf ds + B(u, u)`.
pub fn solve_nsf_direct(
    u0: &SpectralField,
    force: &ForceSpec,
    times: &[f64],
    cfg: &SolverConfig,
) -> Result<(Trajectory, ConvergenceReport)> {
    let grid = *u0.grid();
    let x1 =
        heat_trajectory(u0, times)?.add(&force_response(force, &grid, times, &cfg.quadrature)?)?;
    solve_fixed_point(
        &x1,
        &ZeroOperator,
        &NsBilinear::new(cfg.quadrature),
        cfg,
        None,
    )
}

/// `γ` of the Navier-Stokes `B` (and `λ = 0`) over sample trajectories.
pub fn ns_constants(
    grid: &Grid,
    times: &[f64],
    cfg: &SolverConfig,
    samples: &SampleSpec,
) -> Result<OperatorConstants> {
    let traj = samples.trajectories(grid, times)?;
    estimate_operator_constants(&ZeroOperator, &NsBilinear::new(cfg.quadrature), cfg, &traj)
}
