use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::littlewood_paley::DyadicCutoff;
use crate::spectral::fft;
use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

/// Critical regularity `s_p = -1 + 3/p`.
pub fn s_p(p: f64) -> f64 {
    -1.0 + 3.0 / p
}

/// `(s, p, q)` of a homogeneous Besov space. `f64::INFINITY` encodes ∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidExponent(format!("regularity {s}")));
        }
        for (name, v) in [("p", p), ("q", q)] {
            if v.is_nan() || v < 1.0 {
                return Err(Error::InvalidExponent(format!("{name} = {v} must be >= 1")));
            }
        }
        Ok(Self { s, p, q })
    }

    /// `Ḃ^{s_p}_{p,p}`.
    pub fn critical(p: f64) -> Result<Self> {
        Self::new(s_p(p), p, p)
    }
}

/// `‖f‖_{L^p}` of sampled values with uniform cell weights (`p = ∞`: max).
pub fn lp_of_values(values: &[f64], cell_volume: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let s: f64 = values.iter().map(|v| v.abs().powf(p)).sum();
    (s * cell_volume).powf(1.0 / p)
}

/// `‖u‖_{L^p}` of the pointwise Euclidean magnitude.
pub fn lp_norm(u: &SpectralField, p: f64) -> f64 {
    let phys = u.to_physical();
    lp_of_values(&phys.magnitude(), u.grid().cell_volume(), p)
}

/// `‖·‖_{ℓ^q}` of a finite sequence.
pub fn lq_sum(values: impl IntoIterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else {
        values
            .into_iter()
            .map(|v| v.powf(q))
            .sum::<f64>()
            .powf(1.0 / q)
    }
}

/// `‖Δ_j u‖_{L^p}` for every band of the grid, in increasing `j`.
pub fn band_lp_norms(u: &SpectralField, p: f64) -> Vec<(i32, f64)> {
    let g: Grid = *u.grid();
    let cut = DyadicCutoff::for_grid(&g);
    let bands: Vec<i32> = cut.bands().collect();
    let weights: Vec<Vec<f64>> = bands
        .par_iter()
        .map(|&j| {
            (0..g.len())
                .map(|idx| {
                    let k = g.wavevector(idx);
                    cut.weight(j, (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt())
                })
                .collect()
        })
        .collect();
    let blocks: Vec<Vec<num_complex::Complex64>> = weights
        .par_iter()
        .flat_map(|w| {
            (0..3)
                .map(|a| u.component(a).iter().zip(w).map(|(z, x)| z * x).collect())
                .collect::<Vec<_>>()
        })
        .collect();
    let refs: Vec<&[num_complex::Complex64]> = blocks.iter().map(|b| b.as_slice()).collect();
    let phys = fft::inverse_real_many(&g, &refs);
    let dv = g.cell_volume();
    bands
        .iter()
        .enumerate()
        .map(|(b, &j)| {
            let (x, y, z) = (&phys[3 * b], &phys[3 * b + 1], &phys[3 * b + 2]);
            let mag: Vec<f64> = (0..g.len())
                .map(|i| (x[i] * x[i] + y[i] * y[i] + z[i] * z[i]).sqrt())
                .collect();
            (j, lp_of_values(&mag, dv, p))
        })
        .collect()
}

/// Combines per-band `L^p` norms into `‖2^{js} a_j‖_{ℓ^q}`.
pub fn besov_from_bands(bands: &[(i32, f64)], s: f64, q: f64) -> f64 {
    lq_sum(bands.iter().map(|&(j, a)| (j as f64 * s).exp2() * a), q)
}

/// `‖u‖_{Ḃ^s_{p,q}}` over the grid's resolvable bands.
pub fn besov_norm(u: &SpectralField, idx: &BesovIndex) -> f64 {
    besov_from_bands(&band_lp_norms(u, idx.p), idx.s, idx.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::littlewood_paley::dyadic_block;
    use crate::spectral::random_divfree;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn index_validation() {
        assert!(BesovIndex::new(0.0, 0.5, 1.0).is_err());
        assert!(BesovIndex::new(0.0, 2.0, f64::NAN).is_err());
        assert!(BesovIndex::new(f64::INFINITY, 2.0, 2.0).is_err());
        let c = BesovIndex::critical(4.0).unwrap();
        assert_eq!(c.s, -0.25);
        assert_eq!(c.q, 4.0);
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = Grid::new(8, 1.0).unwrap();
        let idx = BesovIndex::new(0.5, 2.0, 1.0).unwrap();
        assert_eq!(besov_norm(&SpectralField::zeros(g), &idx), 0.0);
    }

    #[test]
    fn single_band_collapses_lq() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        // |k| = 4 = 2^2 sits exactly at the octave: only band 2 sees it.
        let mut u = SpectralField::zeros(g);
        u.set_mode(
            [4, 0, 0],
            [
                Complex64::default(),
                Complex64::new(0.3, 0.1),
                Complex64::default(),
            ],
        );
        let j = 2;
        let a = lp_norm(&dyadic_block(&u, j).unwrap(), 3.0);
        for q in [1.0, 2.0, f64::INFINITY] {
            let b = besov_norm(&u, &BesovIndex::new(0.7, 3.0, q).unwrap());
            assert!((b - (0.7 * j as f64).exp2() * a).abs() < 1e-13 * b);
        }
    }

    #[test]
    fn lq_monotone_and_homogeneous() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        for seed in 0..4 {
            let u = random_divfree(&g, 1.0, 7.0, 0.5, seed, true);
            let n = |q| besov_norm(&u, &BesovIndex::new(-0.25, 4.0, q).unwrap());
            let (n1, n2, ni) = (n(1.0), n(2.0), n(f64::INFINITY));
            assert!(n1 >= n2 && n2 >= ni);
            let idx = BesovIndex::critical(4.0).unwrap();
            let scaled = besov_norm(&u.scaled(-3.5), &idx);
            assert!((scaled - 3.5 * besov_norm(&u, &idx)).abs() < 1e-12 * scaled);
        }
    }
}
