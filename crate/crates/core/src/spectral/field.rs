use num_complex::Complex64;
use rayon::prelude::*;

use super::fft;
use super::grid::Grid;
use crate::Result;

/// Real 3-component vector field stored as Fourier coefficients,
/// `u(x) = Σ_k û(k) e^{ik·x}`.
///
/// Components are stored separately (component-major), each in the grid's
/// flat FFT layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    comps: [Vec<Complex64>; 3],
    divfree: bool,
}

/// Point samples of a real vector field on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub grid: Grid,
    pub comps: [Vec<f64>; 3],
}

impl PhysicalField {
    /// Pointwise Euclidean magnitude `|u(x)|`.
    pub fn magnitude(&self) -> Vec<f64> {
        let [a, b, c] = &self.comps;
        a.par_iter()
            .zip(b.par_iter())
            .zip(c.par_iter())
            .map(|((x, y), z)| (x * x + y * y + z * z).sqrt())
            .collect()
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3] + Sync) -> Self {
        let vals: Vec<[f64; 3]> = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.position(i)))
            .collect();
        let comps = [0, 1, 2].map(|a| vals.iter().map(|v| v[a]).collect());
        Self { grid, comps }
    }
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![Complex64::default(); grid.len()];
        Self {
            grid,
            comps: [z.clone(), z.clone(), z],
            divfree: true,
        }
    }

    /// Wraps raw coefficient arrays; `divfree` is the caller's claim and is
    /// not verified here.
    pub fn from_components(grid: Grid, comps: [Vec<Complex64>; 3], divfree: bool) -> Self {
        for c in &comps {
            assert_eq!(c.len(), grid.len(), "component length does not match grid");
        }
        Self {
            grid,
            comps,
            divfree,
        }
    }

    /// Forward-transforms physical samples (normalised by `1/n^3`).
    pub fn from_physical(phys: &PhysicalField) -> Self {
        let g = phys.grid;
        let mut t = fft::forward_real_many(&g, &[&phys.comps[0], &phys.comps[1], &phys.comps[2]]);
        let c2 = t.pop().unwrap();
        let c1 = t.pop().unwrap();
        let c0 = t.pop().unwrap();
        Self::from_components(g, [c0, c1, c2], false)
    }

    pub fn to_physical(&self) -> PhysicalField {
        let mut t = fft::inverse_real_many(
            &self.grid,
            &[&self.comps[0], &self.comps[1], &self.comps[2]],
        );
        let c2 = t.pop().unwrap();
        let c1 = t.pop().unwrap();
        let c0 = t.pop().unwrap();
        PhysicalField {
            grid: self.grid,
            comps: [c0, c1, c2],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, a: usize) -> &[Complex64] {
        &self.comps[a]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    pub fn is_divfree(&self) -> bool {
        self.divfree
    }

    pub fn set_divfree(&mut self, flag: bool) {
        self.divfree = flag;
    }

    pub fn coefficient(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    /// Sets the mode at lattice point `m` and its mirror `-m` so that the
    /// field stays real. Returns false if `m` is not stored on the grid.
    pub fn set_mode(&mut self, m: [i64; 3], amp: [Complex64; 3]) -> bool {
        let Some(idx) = self.grid.index_of(m) else {
            return false;
        };
        let mirror = self.grid.mirror(idx);
        for a in 0..3 {
            self.comps[a][idx] = amp[a];
            self.comps[a][mirror] = amp[a].conj();
        }
        if idx == mirror {
            for a in 0..3 {
                self.comps[a][idx] = Complex64::new(amp[a].re, 0.0);
            }
        }
        true
    }

    /// Zeroes the `k = 0` mode.
    pub fn remove_mean(&mut self) {
        for c in &mut self.comps {
            c[0] = Complex64::default();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re == 0.0 && z.im == 0.0))
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.comps {
            c.par_iter_mut().for_each(|z| *z *= s);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            x.par_iter_mut()
                .zip(y.par_iter())
                .for_each(|(x, y)| *x += a * y);
        }
        self.divfree = self.divfree && other.divfree;
        Ok(())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SpectralField, b: f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let comps = [0, 1, 2].map(|k| {
            self.comps[k]
                .par_iter()
                .zip(other.comps[k].par_iter())
                .map(|(x, y)| a * x + b * y)
                .collect()
        });
        Ok(Self {
            grid: self.grid,
            comps,
            divfree: self.divfree && other.divfree,
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    /// Applies a real per-mode multiplier `m(idx)` to every component.
    pub fn map_modes(&self, m: impl Fn(usize) -> f64 + Sync) -> Self {
        let comps = [0, 1, 2].map(|k| {
            self.comps[k]
                .par_iter()
                .enumerate()
                .map(|(idx, z)| z * m(idx))
                .collect()
        });
        Self {
            grid: self.grid,
            comps,
            divfree: self.divfree,
        }
    }

    /// Sum of `|û(k)|^2` over all modes and components.
    pub fn coefficient_energy(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// `‖u‖_{L^2}` over the box via Parseval.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.volume() * self.coefficient_energy()).sqrt()
    }

    /// `‖∇u‖_{L^2}` via Parseval.
    pub fn h1_seminorm(&self) -> f64 {
        let k2 = self.grid.k_squared();
        let s: f64 = self
            .comps
            .iter()
            .map(|c| {
                c.iter()
                    .zip(&k2)
                    .map(|(z, k)| k * z.norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        (self.grid.volume() * s).sqrt()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// `max_k |û(-k) - conj(û(k))| / max_k |û(k)|` (0 for the zero field).
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_coefficient();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for idx in 0..self.grid.len() {
                let d = (c[self.grid.mirror(idx)] - c[idx].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// `max_k |k·û(k)| / max_k |k||û(k)|` (0 for the zero field).
    pub fn divergence_defect(&self) -> f64 {
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.wavevector(idx);
            let u = self.coefficient(idx);
            let dot = u[0] * k[0] + u[1] * k[1] + u[2] * k[2];
            let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            let un = (u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr()).sqrt();
            num = num.max(dot.norm());
            den = den.max(kn * un);
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    /// Zeroes every mode outside the 2/3-rule cube.
    pub fn dealiased(&self) -> Self {
        let g = self.grid;
        self.map_modes(|idx| {
            if g.is_resolved(g.lattice(idx)) {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Largest coefficient-wise distance `max_k |û(k) - v̂(k)|`.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_round_trip_and_samples() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut u = SpectralField::zeros(g);
        let amp = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, -0.25),
            Complex64::new(0.0, 0.0),
        ];
        u.set_mode([1, 0, 0], amp);
        let phys = u.to_physical();
        // u_y(x) = 2 Re(amp e^{ix}) = cos x + 0.5 sin x
        for idx in 0..g.len() {
            let x = g.position(idx)[0];
            let expect = x.cos() + 0.5 * x.sin();
            assert!((phys.comps[1][idx] - expect).abs() < 1e-14);
        }
        let back = SpectralField::from_physical(&phys);
        assert!(back.max_abs_diff(&u) < 1e-15);
        assert!(back.hermitian_defect() < 1e-12);
    }

    #[test]
    fn parseval_l2() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_mode(
            [0, 2, 1],
            [
                Complex64::new(0.3, 0.1),
                Complex64::default(),
                Complex64::default(),
            ],
        );
        let phys = u.to_physical();
        let quad: f64 = phys.comps[0].iter().map(|v| v * v).sum::<f64>() * g.cell_volume();
        assert!((u.l2_norm() - quad.sqrt()).abs() < 1e-12);
    }
}
