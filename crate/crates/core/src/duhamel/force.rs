use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, QuadratureConfig};
use crate::spaces::weak_l3;
use crate::spectral::{leray_project, Grid, SpectralField, Trajectory};
use crate::{Error, Result};

/// One Fourier mode of a steady force; `amplitude` is the coefficient at
/// `mode` (its mirror gets the conjugate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceMode {
    pub mode: [i64; 3],
    pub amplitude: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForceKind {
    /// `f = ∇g` with `g = amplitude·exp(-|x-c|^2 / (2 width^2))`, periodised.
    GradientOfProfile {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Option<[f64; 3]>,
    },
    /// Finite sum of steady Fourier modes.
    TimeIndependentModeSum { modes: Vec<ForceMode> },
    /// `amplitude·direction` times a unit-mass periodised Gaussian of the
    /// given width.
    ScaledDiracSurrogate {
        amplitude: f64,
        width: f64,
        direction: [f64; 3],
        #[serde(default)]
        center: Option<[f64; 3]>,
    },
}

/// External force plus its cached `𝒴` norm.
///
/// All kinds are steady, so `evaluate` ignores `t`. Only modes inside the
/// 2/3 cube are populated and Nyquist planes stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceSpec {
    #[serde(flatten)]
    pub kind: ForceKind,
    #[serde(default)]
    pub y_norm: Option<f64>,
}

impl ForceSpec {
    pub fn new(kind: ForceKind) -> Self {
        Self { kind, y_norm: None }
    }

    pub fn zero() -> Self {
        Self::new(ForceKind::TimeIndependentModeSum { modes: vec![] })
    }

    /// Same force multiplied by `c` (the cache is scaled along).
    pub fn scaled(&self, c: f64) -> Self {
        let kind = match &self.kind {
            ForceKind::GradientOfProfile {
                amplitude,
                width,
                center,
            } => ForceKind::GradientOfProfile {
                amplitude: amplitude * c,
                width: *width,
                center: *center,
            },
            ForceKind::TimeIndependentModeSum { modes } => ForceKind::TimeIndependentModeSum {
                modes: modes
                    .iter()
                    .map(|m| ForceMode {
                        mode: m.mode,
                        amplitude: m.amplitude.map(|a| a * c),
                    })
                    .collect(),
            },
            ForceKind::ScaledDiracSurrogate {
                amplitude,
                width,
                direction,
                center,
            } => ForceKind::ScaledDiracSurrogate {
                amplitude: amplitude * c,
                width: *width,
                direction: *direction,
                center: *center,
            },
        };
        Self {
            kind,
            y_norm: self.y_norm.map(|y| y * c.abs()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ForceKind::GradientOfProfile { width, .. }
            | ForceKind::ScaledDiracSurrogate { width, .. } => {
                if !(*width > 0.0) || !width.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "force width must be positive, got {width}"
                    )));
                }
            }
            ForceKind::TimeIndependentModeSum { modes } => {
                if modes.iter().any(|m| m.mode == [0, 0, 0]) {
                    return Err(Error::InvalidConfig("force modes must be nonzero".into()));
                }
            }
        }
        Ok(())
    }

    /// `f(t)` on `grid`.
    pub fn evaluate(&self, grid: &Grid, t: f64) -> Result<SpectralField> {
        if !(t >= 0.0) {
            return Err(Error::InvalidTimes(format!(
                "force evaluated at t = {t} < 0"
            )));
        }
        self.validate()?;
        let mut f = SpectralField::zeros(*grid);
        f.set_divfree(false);
        match &self.kind {
            ForceKind::TimeIndependentModeSum { modes } => {
                for m in modes {
                    if !grid.is_resolved(m.mode) {
                        return Err(Error::InvalidConfig(format!(
                            "force mode {:?} is not resolved on {grid}",
                            m.mode
                        )));
                    }
                    let idx = grid.index_of(m.mode).unwrap();
                    let old = f.coefficient(idx);
                    let amp = [0, 1, 2].map(|a| old[a] + m.amplitude[a]);
                    f.set_mode(m.mode, amp);
                }
            }
            ForceKind::GradientOfProfile {
                amplitude,
                width,
                center,
            } => {
                let norm = (2.0 * std::f64::consts::PI).powf(1.5) * width.powi(3);
                fill_gaussian(&mut f, *width, *center, |k, g| {
                    [0, 1, 2].map(|a| Complex64::new(0.0, k[a]) * g * (amplitude * norm))
                });
            }
            ForceKind::ScaledDiracSurrogate {
                amplitude,
                width,
                direction,
                center,
            } => {
                fill_gaussian(&mut f, *width, *center, |_, g| {
                    direction.map(|d| g * (amplitude * d))
                });
            }
        }
        Ok(f)
    }
}

/// Writes `coeff(k, ĝ(k))` for the Fourier coefficients `ĝ` of the unit-mass
/// Gaussian of width `w` centred at `c` (box centre by default).
fn fill_gaussian(
    f: &mut SpectralField,
    w: f64,
    center: Option<[f64; 3]>,
    coeff: impl Fn([f64; 3], Complex64) -> [Complex64; 3],
) {
    let grid = *f.grid();
    let c = center.unwrap_or([grid.box_length() / 2.0; 3]);
    let half = grid.n() as i64 / 2;
    let comps = f.components_mut();
    for idx in 0..grid.len() {
        let m = grid.lattice(idx);
        if !grid.is_resolved(m) || m.iter().any(|x| x.abs() == half) {
            continue;
        }
        let k = grid.wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let phase = -(k[0] * c[0] + k[1] * c[1] + k[2] * c[2]);
        let g = Complex64::from_polar((-0.5 * w * w * k2).exp() / grid.volume(), phase);
        let v = coeff(k, g);
        for a in 0..3 {
            comps[a][idx] = v[a];
        }
    }
}

/// Zero-mean Leray projection of `f(t)`.
fn projected(f: &ForceSpec, grid: &Grid, t: f64) -> Result<SpectralField> {
    let mut p = leray_project(&f.evaluate(grid, t)?);
    p.remove_mean();
    Ok(p)
}

/// `t ↦ ∫_0^t e^{(t-s)Δ} P f(s) ds` on `times`.
pub fn force_response(
    f: &ForceSpec,
    grid: &Grid,
    times: &[f64],
    q: &QuadratureConfig,
) -> Result<Trajectory> {
    // Steady force: project once.
    let pf = projected(f, grid, 0.0)?;
    if pf.is_zero() {
        return Trajectory::zeros(*grid, times.to_vec());
    }
    let ys = integrate(grid, times, q, |_| Ok(pf.clone()))?;
    let states = ys
        .into_iter()
        .map(|mut y| {
            y.set_divfree(true);
            y
        })
        .collect();
    Trajectory::new(times.to_vec(), states)
}

/// Sampled `𝒴` norm with its saturation diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YNormReport {
    pub value: f64,
    /// False when the running sup grew by more than 1% over the last 20%
    /// of the samples.
    pub saturated: bool,
    pub times: Vec<f64>,
    /// Weak-`L^3` norm of the response at each sample.
    pub series: Vec<f64>,
}

/// `sup_t ‖∫_0^t e^{(t-s)Δ} P f ds‖_{L^{3,∞}}` over `times`; caches the value
/// on `f`.
pub fn y_norm(
    f: &mut ForceSpec,
    grid: &Grid,
    times: &[f64],
    q: &QuadratureConfig,
) -> Result<YNormReport> {
    let resp = force_response(f, grid, times, q)?;
    let report = y_norm_of_response(&resp);
    f.y_norm = Some(report.value);
    Ok(report)
}

pub fn y_norm_of_response(resp: &Trajectory) -> YNormReport {
    use rayon::prelude::*;
    let series: Vec<f64> = resp.states().par_iter().map(weak_l3).collect();
    let mut running = Vec::with_capacity(series.len());
    let mut sup: f64 = 0.0;
    for v in &series {
        sup = sup.max(*v);
        running.push(sup);
    }
    let cut = (series.len() as f64 * 0.8).floor() as usize;
    let before = running[cut.min(series.len() - 1).saturating_sub(1)];
    let saturated = sup == 0.0 || (sup - before) <= 0.01 * sup;
    YNormReport {
        value: sup,
        saturated,
        times: resp.times().to_vec(),
        series,
    }
}
