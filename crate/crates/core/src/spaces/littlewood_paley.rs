//! Dyadic frequency localisation on the lattice.

use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

/// Radial cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`, quintic smoothstep in
/// `log2 r` in between.
pub fn psi(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let x = r.log2();
        1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

/// Band range resolvable on a grid, with renormalised boundary bands.
///
/// Interior bands use `φ_j(ξ) = ψ(ξ/2^j) - ψ(ξ/2^{j-1})`. The lowest band
/// absorbs everything below it (`ψ(ξ/2^{j_min})`) and the highest absorbs
/// everything above (`1 - ψ(ξ/2^{j_max-1})`), so the bands sum to one on
/// every nonzero lattice point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicCutoff {
    pub j_min: i32,
    pub j_max: i32,
}

impl DyadicCutoff {
    pub fn for_grid(grid: &Grid) -> Self {
        Self {
            j_min: grid.k_min().log2().floor() as i32,
            j_max: grid.k_max().log2().ceil() as i32,
        }
    }

    pub fn bands(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    /// Weight of band `j` at frequency magnitude `xi`.
    pub fn weight(&self, j: i32, xi: f64) -> f64 {
        if xi == 0.0 {
            return 0.0;
        }
        let upper = if j == self.j_max {
            1.0
        } else {
            psi(xi / (j as f64).exp2())
        };
        let lower = if j == self.j_min {
            0.0
        } else {
            psi(xi / ((j - 1) as f64).exp2())
        };
        upper - lower
    }
}

/// `Δ_j u`: multiplies every mode by the band weight `φ_j(|k|)`.
pub fn dyadic_block(u: &SpectralField, j: i32) -> Result<SpectralField> {
    let g = *u.grid();
    let cut = DyadicCutoff::for_grid(&g);
    if !cut.contains(j) {
        return Err(Error::BandOutOfRange {
            j,
            j_min: cut.j_min,
            j_max: cut.j_max,
        });
    }
    Ok(u.map_modes(|idx| {
        let k = g.wavevector(idx);
        cut.weight(j, (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt())
    }))
}

/// All blocks `Δ_j u` for `j` in the grid's band range.
pub fn all_blocks(u: &SpectralField) -> Vec<(i32, SpectralField)> {
    let cut = DyadicCutoff::for_grid(u.grid());
    cut.bands()
        .map(|j| (j, dyadic_block(u, j).expect("band in range")))
        .collect()
}
