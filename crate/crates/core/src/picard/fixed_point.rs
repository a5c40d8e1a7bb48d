use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::operators::{BilinearOperator, LinearOperator};
use crate::duhamel::heat_trajectory;
use crate::spectral::{random_divfree, Grid, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    Diverged,
    MaxIters,
}

/// Empirical `γ` (bilinear) and `λ` (linear) constants in the contraction norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorConstants {
    pub gamma: f64,
    pub lambda: f64,
    /// Sample pairs (bilinear) and samples (linear) that entered the maxima.
    pub bilinear_samples: usize,
    pub linear_samples: usize,
}

/// Outcome of the small-data check `2γ‖x‖ <= (1-λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallDataCheck {
    /// `(1-λ)^2 / (4γ)`.
    pub threshold: f64,
    pub x1_norm: f64,
    /// `2γ‖x‖`.
    pub lhs: f64,
    /// `1 - λ`.
    pub rhs: f64,
    /// `lhs <= rhs·(1 + 0.05)`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub status: SolveStatus,
    /// `‖x^{(n)}‖` for `n = 1, 2, ...`.
    pub iterates_norms: Vec<f64>,
    /// `‖x^{(n+1)} - x^{(n)}‖` for `n = 0, 1, ...`.
    pub differences: Vec<f64>,
    /// Successive-difference ratios, `differences[n] / differences[n-1]`.
    pub ratios: Vec<f64>,
    pub gamma_est: Option<f64>,
    pub lambda_est: Option<f64>,
    pub x1_norm: f64,
    /// `‖x - (x1 + L(x) + B(x,x))‖ / ‖x‖` of the returned trajectory.
    pub residual: Option<f64>,
    pub small_data: Option<SmallDataCheck>,
    pub iterations: usize,
    pub wall_time_s: f64,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// Norm of the last computed iterate.
    pub fn final_norm(&self) -> f64 {
        self.iterates_norms.last().copied().unwrap_or(0.0)
    }
}

/// Random sample trajectories: heat flows of banded divergence-free fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub count: usize,
    pub k_lo: f64,
    pub k_hi: f64,
    pub seed: u64,
}

impl SampleSpec {
    pub fn for_grid(grid: &Grid, count: usize, seed: u64) -> Self {
        let k_hi = (grid.dealias_cutoff() as f64 * grid.k_spacing() / 2.0).max(grid.k_min());
        Self {
            count,
            k_lo: grid.k_min(),
            k_hi,
            seed,
        }
    }

    pub fn trajectories(&self, grid: &Grid, times: &[f64]) -> Result<Vec<Trajectory>> {
        (0..self.count as u64)
            .map(|i| {
                let u0 = random_divfree(
                    grid,
                    self.k_lo,
                    self.k_hi,
                    0.0,
                    self.seed.wrapping_add(i),
                    true,
                );
                heat_trajectory(&u0, times)
            })
            .collect()
    }
}

/// Maxima of `‖B(x,y)‖/(‖x‖‖y‖)` over the pairs `(i,i)` and `(i,i+1)` and
/// of `‖L(x)‖/‖x‖` over the samples. Zero-norm samples are skipped.
pub fn estimate_operator_constants(
    linear: &dyn LinearOperator,
    bilinear: &dyn BilinearOperator,
    cfg: &SolverConfig,
    samples: &[Trajectory],
) -> Result<OperatorConstants> {
    if samples.len() < 10 {
        return Err(Error::InvalidConfig(format!(
            "operator estimates need at least 10 samples, got {}",
            samples.len()
        )));
    }
    let norm = cfg.norm()?;
    let norms: Vec<f64> = samples
        .iter()
        .map(|s| norm.norm(s))
        .collect::<Result<_>>()?;
    let mut out = OperatorConstants {
        gamma: 0.0,
        lambda: 0.0,
        bilinear_samples: 0,
        linear_samples: 0,
    };
    for i in 0..samples.len() {
        for j in [i, i + 1] {
            if j >= samples.len() || norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let b = bilinear.apply(&samples[i], &samples[j])?;
            out.gamma = out.gamma.max(norm.norm(&b)? / (norms[i] * norms[j]));
            out.bilinear_samples += 1;
        }
        if !linear.is_zero() && norms[i] > 0.0 {
            let l = linear.apply(&samples[i])?;
            out.lambda = out.lambda.max(norm.norm(&l)? / norms[i]);
            out.linear_samples += 1;
        }
    }
    Ok(out)
}

/// Picard iteration `x^{(n+1)} = x1 + L(x^{(n)}) + B(x^{(n)}, x^{(n)})` from
/// `x^{(0)} = 0` in the contraction norm of `cfg`.
///
/// On convergence the returned `x` is the last iterate whose successor was
/// computed, so its residual is exactly the last recorded difference. On
/// divergence or exhaustion the last iterate is returned with the status.
pub fn solve_fixed_point(
    x1: &Trajectory,
    linear: &dyn LinearOperator,
    bilinear: &dyn BilinearOperator,
    cfg: &SolverConfig,
    constants: Option<&OperatorConstants>,
) -> Result<(Trajectory, ConvergenceReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let norm = cfg.norm()?;
    let x1_norm = norm.norm(x1)?;
    if !x1_norm.is_finite() {
        return Err(Error::InvalidConfig("x1 has a non-finite norm".into()));
    }
    let mut report = ConvergenceReport {
        status: SolveStatus::MaxIters,
        iterates_norms: vec![],
        differences: vec![],
        ratios: vec![],
        gamma_est: constants.map(|c| c.gamma),
        lambda_est: constants.map(|c| c.lambda),
        x1_norm,
        residual: None,
        small_data: None,
        iterations: 0,
        wall_time_s: 0.0,
    };
    let mut x = Trajectory::zeros(*x1.grid(), x1.times().to_vec())?;
    let mut x_norm = 0.0;
    let (x, x_norm) = 'iterate: {
        for n in 0..cfg.max_iters {
            let mut next = x1.clone();
            if !linear.is_zero() {
                next = next.add(&linear.apply(&x)?)?;
            }
            next = next.add(&bilinear.apply(&x, &x)?)?;
            let diff = norm.norm(&next.sub(&x)?)?;
            let next_norm = norm.norm(&next)?;
            report.iterations = n + 1;
            if let Some(prev) = report.differences.last() {
                report
                    .ratios
                    .push(if *prev > 0.0 { diff / prev } else { 0.0 });
            }
            report.differences.push(diff);
            report.iterates_norms.push(next_norm);
            if diff == 0.0 || (n > 0 && diff <= cfg.rel_tol * x_norm) {
                report.status = SolveStatus::Converged;
                report.residual = Some(if x_norm > 0.0 { diff / x_norm } else { 0.0 });
                break 'iterate (x, x_norm);
            }
            if !next_norm.is_finite() || next_norm > cfg.divergence_threshold {
                report.status = SolveStatus::Diverged;
                break 'iterate (next, next_norm);
            }
            x = next;
            x_norm = next_norm;
        }
        (x, x_norm)
    };
    if let (Some(c), true) = (constants, report.converged()) {
        if c.gamma > 0.0 && c.lambda < 1.0 {
            let threshold = (1.0 - c.lambda).powi(2) / (4.0 * c.gamma);
            if x1_norm < threshold {
                let lhs = 2.0 * c.gamma * x_norm;
                let rhs = 1.0 - c.lambda;
                report.small_data = Some(SmallDataCheck {
                    threshold,
                    x1_norm,
                    lhs,
                    rhs,
                    holds: lhs <= rhs * 1.05,
                });
            }
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok((x, report))
}
