use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Periodic cube `[0, box_length)^3` sampled with `n` points per axis.
///
/// Coefficient and sample arrays use the same flat layout,
/// `index = (ix * n + iy) * n + iz`, with axis indices in FFT order: index
/// `i` carries the integer wavenumber `i` for `i <= n/2` and `i - n` above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and at least 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        Ok(Self { n, box_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Total number of lattice points, `n^3`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing in wavenumber space, `2π / box_length`.
    pub fn k_spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Smallest nonzero resolved |k|.
    pub fn k_min(&self) -> f64 {
        self.k_spacing()
    }

    /// Largest resolved wavenumber along an axis, `(2π/L) * n/2`.
    pub fn k_max(&self) -> f64 {
        self.k_spacing() * (self.n / 2) as f64
    }

    pub fn cell_volume(&self) -> f64 {
        let h = self.box_length / self.n as f64;
        h * h * h
    }

    pub fn volume(&self) -> f64 {
        self.box_length * self.box_length * self.box_length
    }

    /// Signed integer wavenumber of an axis index.
    #[inline]
    pub fn axis_mode(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    fn axis_index(&self, m: i64) -> Option<usize> {
        let n = self.n as i64;
        if m > n / 2 || m <= -n / 2 {
            return None;
        }
        Some(m.rem_euclid(n) as usize)
    }

    /// Integer lattice coordinates of a flat index.
    #[inline]
    pub fn lattice(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [
            self.axis_mode(idx / (n * n)),
            self.axis_mode((idx / n) % n),
            self.axis_mode(idx % n),
        ]
    }

    /// Flat index of an integer lattice point, if it is stored on the grid.
    pub fn index_of(&self, m: [i64; 3]) -> Option<usize> {
        let (a, b, c) = (
            self.axis_index(m[0])?,
            self.axis_index(m[1])?,
            self.axis_index(m[2])?,
        );
        Some((a * self.n + b) * self.n + c)
    }

    /// Flat index of the mirrored lattice point `-m` (Nyquist folds onto itself).
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        let n = self.n;
        let (a, b, c) = (idx / (n * n), (idx / n) % n, idx % n);
        (((n - a) % n) * n + (n - b) % n) * n + (n - c) % n
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.lattice(idx);
        let dk = self.k_spacing();
        [m[0] as f64 * dk, m[1] as f64 * dk, m[2] as f64 * dk]
    }

    /// `|k|^2` for every lattice point.
    pub fn k_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|idx| {
                let k = self.wavevector(idx);
                k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
            })
            .collect()
    }

    /// Largest |m_i| kept by the 2/3 rule: the biggest `K` with `3K < n`.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n as i64 - 1) / 3
    }

    /// Whether a lattice point survives 2/3-rule truncation.
    #[inline]
    pub fn is_resolved(&self, m: [i64; 3]) -> bool {
        let c = self.dealias_cutoff();
        m.iter().all(|x| x.abs() <= c)
    }

    pub fn dealias_mask(&self) -> Vec<bool> {
        (0..self.len())
            .map(|idx| self.is_resolved(self.lattice(idx)))
            .collect()
    }

    /// Physical coordinate of a sample index.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let h = self.box_length / n as f64;
        [
            (idx / (n * n)) as f64 * h,
            ((idx / n) % n) as f64 * h,
            (idx % n) as f64 * h,
        ]
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^3 on box {}", self.n, self.box_length)
    }
}

/// Validated constructor matching the CLI vocabulary.
pub fn make_grid(n_per_axis: usize, box_length: f64) -> Result<Grid> {
    Grid::new(n_per_axis, box_length)
}
