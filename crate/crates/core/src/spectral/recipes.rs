//! Named and random initial-data generators.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::field::{PhysicalField, SpectralField};
use super::grid::Grid;
use super::ops::leray_project;
use crate::spaces::besov::{besov_norm, s_p, BesovIndex};
use crate::spaces::lorentz::weak_l3;
use crate::{Error, Result};

/// Random real divergence-free zero-mean field whose modes satisfy
/// `k_lo <= |k| <= k_hi`, with Gaussian coefficients weighted by `|k|^{-slope}`.
///
/// When `resolved_only` is set, modes outside the 2/3 cube are left empty.
pub fn random_divfree(
    grid: &Grid,
    k_lo: f64,
    k_hi: f64,
    slope: f64,
    seed: u64,
    resolved_only: bool,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = SpectralField::zeros(*grid);
    for idx in 1..grid.len() {
        let mirror = grid.mirror(idx);
        if mirror <= idx {
            continue;
        }
        let m = grid.lattice(idx);
        if m.iter().any(|x| x.abs() == grid.n() as i64 / 2) {
            continue;
        }
        if resolved_only && !grid.is_resolved(m) {
            continue;
        }
        let k = grid.wavevector(idx);
        let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        if kn < k_lo || kn > k_hi {
            continue;
        }
        let w = kn.powf(-slope);
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let amp = [0, 1, 2].map(|_| Complex64::new(draw(), draw()) * w);
        u.set_mode(m, amp);
    }
    let mut p = leray_project(&u);
    p.remove_mean();
    p
}

/// How a recipe's output is rescaled after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "snake_case")]
pub enum Normalization {
    /// Critical Besov norm `Ḃ^{s_p}_{p,p}`.
    CriticalBesov {
        p: f64,
        value: f64,
    },
    L2 {
        value: f64,
    },
    WeakL3 {
        value: f64,
    },
}

/// Serializable description of a velocity field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldRecipe {
    Zero,
    /// Band-limited random divergence-free field.
    RandomBanded {
        k_lo: f64,
        k_hi: f64,
        #[serde(default)]
        slope: f64,
        seed: u64,
        #[serde(default)]
        normalize: Option<Normalization>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// One Fourier mode (plus its conjugate), Leray-projected.
    SingleMode {
        mode: [i64; 3],
        amplitude: [f64; 3],
        #[serde(default)]
        normalize: Option<Normalization>,
    },
    /// `A (sin kx cos ky cos kz, -cos kx sin ky cos kz, 0)` in box units.
    TaylorGreen {
        amplitude: f64,
        k: i64,
        #[serde(default)]
        normalize: Option<Normalization>,
    },
    /// Finite-energy swirl `curl(ψ e_z)` with a periodised Gaussian `ψ`.
    GaussianBump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Option<[f64; 3]>,
        #[serde(default)]
        normalize: Option<Normalization>,
    },
    /// Sum of recipes.
    Sum {
        parts: Vec<FieldRecipe>,
    },
}

fn one() -> f64 {
    1.0
}

impl FieldRecipe {
    pub fn build(&self, grid: &Grid) -> Result<SpectralField> {
        let (field, normalize) = match self {
            FieldRecipe::Zero => (SpectralField::zeros(*grid), None),
            FieldRecipe::RandomBanded {
                k_lo,
                k_hi,
                slope,
                seed,
                normalize,
                amplitude,
            } => {
                if !(k_hi >= k_lo) {
                    return Err(Error::InvalidConfig(format!(
                        "random band needs k_lo <= k_hi, got [{k_lo}, {k_hi}]"
                    )));
                }
                let f = random_divfree(grid, *k_lo, *k_hi, *slope, *seed, true);
                if f.is_zero() {
                    return Err(Error::InvalidConfig(format!(
                        "band [{k_lo}, {k_hi}] holds no resolved modes on {grid}"
                    )));
                }
                (f.scaled(*amplitude), *normalize)
            }
            FieldRecipe::SingleMode {
                mode,
                amplitude,
                normalize,
            } => {
                if !grid.is_resolved(*mode) || *mode == [0, 0, 0] {
                    return Err(Error::InvalidConfig(format!(
                        "mode {mode:?} is not a resolved nonzero lattice point"
                    )));
                }
                let mut u = SpectralField::zeros(*grid);
                u.set_mode(*mode, amplitude.map(|a| Complex64::new(a, 0.0)));
                (leray_project(&u), *normalize)
            }
            FieldRecipe::TaylorGreen {
                amplitude,
                k,
                normalize,
            } => {
                let dk = grid.k_spacing() * *k as f64;
                let a = *amplitude;
                let phys = PhysicalField::from_fn(*grid, |x| {
                    let (sx, cx) = (dk * x[0]).sin_cos();
                    let (sy, cy) = (dk * x[1]).sin_cos();
                    let cz = (dk * x[2]).cos();
                    [a * sx * cy * cz, -a * cx * sy * cz, 0.0]
                });
                let mut u = leray_project(&SpectralField::from_physical(&phys).dealiased());
                u.remove_mean();
                (u, *normalize)
            }
            FieldRecipe::GaussianBump {
                amplitude,
                width,
                center,
                normalize,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidConfig("bump width must be positive".into()));
                }
                let l = grid.box_length();
                let c = center.unwrap_or([l / 2.0; 3]);
                let mut u = SpectralField::zeros(*grid);
                let comps = u.components_mut();
                // ψ̂(k) of the periodised Gaussian exp(-|x-c|^2 / (2 w^2)),
                // then u = curl(ψ e_z) = (∂_y ψ, -∂_x ψ, 0).
                let norm = (2.0 * std::f64::consts::PI).powf(1.5) * width.powi(3) / grid.volume();
                for idx in 1..grid.len() {
                    let m = grid.lattice(idx);
                    if !grid.is_resolved(m) {
                        continue;
                    }
                    let k = grid.wavevector(idx);
                    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    let phase = -(k[0] * c[0] + k[1] * c[1] + k[2] * c[2]);
                    let psi = Complex64::from_polar(
                        amplitude * norm * (-0.5 * width * width * k2).exp(),
                        phase,
                    );
                    comps[0][idx] = Complex64::new(0.0, k[1]) * psi;
                    comps[1][idx] = Complex64::new(0.0, -k[0]) * psi;
                }
                u.set_divfree(true);
                (u, *normalize)
            }
            FieldRecipe::Sum { parts } => {
                let mut acc = SpectralField::zeros(*grid);
                for p in parts {
                    acc.axpy(1.0, &p.build(grid)?)?;
                }
                acc.set_divfree(true);
                (acc, None)
            }
        };
        match normalize {
            None => Ok(field),
            Some(n) => normalized(field, n),
        }
    }
}

fn normalized(field: SpectralField, n: Normalization) -> Result<SpectralField> {
    let (current, target) = match n {
        Normalization::CriticalBesov { p, value } => {
            (besov_norm(&field, &BesovIndex::new(s_p(p), p, p)?), value)
        }
        Normalization::L2 { value } => (field.l2_norm(), value),
        Normalization::WeakL3 { value } => (weak_l3(&field), value),
    };
    if current == 0.0 {
        return Err(Error::InvalidConfig("cannot normalise a zero field".into()));
    }
    Ok(field.scaled(target / current))
}
