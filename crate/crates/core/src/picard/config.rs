use serde::{Deserialize, Serialize};

use crate::duhamel::QuadratureConfig;
use crate::spaces::time_norms::BandProfile;
use crate::spaces::{s_p, BesovIndex, TimeNormSpec};
use crate::spectral::Trajectory;
use crate::{Error, Result};

/// Default time exponent `2p/(p-1)`.
pub fn default_r0(p: f64) -> f64 {
    2.0 * p / (p - 1.0)
}

/// The norm `𝕃^{r0:∞}_p(T)`: the larger of the `L̃^{r0}(Ḃ^{s_p+2/r0}_{p,p})`
/// and `L̃^∞(Ḃ^{s_p}_{p,p})` norms on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionNorm {
    pub p: f64,
    pub r0: f64,
}

impl ContractionNorm {
    pub fn new(p: f64, r0: f64) -> Result<Self> {
        if !(p > 3.0) || !p.is_finite() {
            return Err(Error::InvalidExponent(format!(
                "contraction norm needs 3 < p < ∞, got {p}"
            )));
        }
        let upper = 2.0 * p / (p - 3.0);
        if !(r0 > 2.0 && r0 < upper) {
            return Err(Error::InvalidExponent(format!(
                "r0 = {r0} must lie in (2, {upper}) for p = {p}"
            )));
        }
        Ok(Self { p, r0 })
    }

    /// Norm over the whole trajectory span.
    pub fn norm(&self, traj: &Trajectory) -> Result<f64> {
        self.profile(traj)
            .critical_pair(self.r0, f64::INFINITY, traj.end_time())
    }

    pub fn profile(&self, traj: &Trajectory) -> BandProfile {
        BandProfile::of(traj, self.p)
    }

    /// The `L̃^{r0}` half as a [`TimeNormSpec`] on `[0, t_end]`.
    pub fn norm_spec(&self, t_end: f64) -> Result<TimeNormSpec> {
        TimeNormSpec::new(
            BesovIndex::new(s_p(self.p) + 2.0 / self.r0, self.p, self.p)?,
            self.r0,
            (0.0, t_end),
        )
    }
}

fn default_max_iters() -> usize {
    60
}
fn default_rel_tol() -> f64 {
    1e-10
}
fn default_threshold() -> f64 {
    1e3
}
fn default_bound_tol() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub p: f64,
    /// Time exponent of the contraction norm; `2p/(p-1)` when absent.
    #[serde(default)]
    pub r0: Option<f64>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Absolute contraction-norm level at which an iteration is declared
    /// divergent.
    #[serde(default = "default_threshold")]
    pub divergence_threshold: f64,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    /// Largest `𝒴` norm considered small; exceeding it only warns.
    #[serde(default)]
    pub smallness_budget: Option<f64>,
    /// Relative slack in the `‖U_f‖ <= 2‖f‖_𝒴` check.
    #[serde(default = "default_bound_tol")]
    pub bound_tol: f64,
}

impl SolverConfig {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            r0: None,
            max_iters: default_max_iters(),
            rel_tol: default_rel_tol(),
            divergence_threshold: default_threshold(),
            quadrature: QuadratureConfig::default(),
            smallness_budget: None,
            bound_tol: default_bound_tol(),
        }
    }

    pub fn r0(&self) -> f64 {
        self.r0.unwrap_or_else(|| default_r0(self.p))
    }

    pub fn norm(&self) -> Result<ContractionNorm> {
        ContractionNorm::new(self.p, self.r0())
    }

    pub fn validate(&self) -> Result<()> {
        self.norm()?;
        self.quadrature.validate()?;
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::InvalidConfig(
                "divergence_threshold must be positive".into(),
            ));
        }
        if !(self.bound_tol >= 0.0) {
            return Err(Error::InvalidConfig("bound_tol must be nonnegative".into()));
        }
        Ok(())
    }
}
