use num_complex::Complex64;
use rayon::prelude::*;

use super::fft;
use super::field::SpectralField;
use super::grid::Grid;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn per_mode(grid: &Grid, f: impl Fn(usize) -> [Complex64; 3] + Sync + Send) -> [Vec<Complex64>; 3] {
    let vals: Vec<[Complex64; 3]> = (0..grid.len()).into_par_iter().map(f).collect();
    [0, 1, 2].map(|a| vals.iter().map(|v| v[a]).collect())
}

#[inline]
fn project_mode(k: [f64; 3], u: [Complex64; 3]) -> [Complex64; 3] {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if k2 == 0.0 {
        return u;
    }
    let dot = (u[0] * k[0] + u[1] * k[1] + u[2] * k[2]) / k2;
    [u[0] - dot * k[0], u[1] - dot * k[1], u[2] - dot * k[2]]
}

/// Leray projection onto divergence-free fields: per mode
/// `û ↦ û - k (k·û)/|k|^2`; the `k = 0` mode passes through unchanged.
pub fn leray_project(u: &SpectralField) -> SpectralField {
    let g = *u.grid();
    let comps = per_mode(&g, |idx| {
        project_mode(g.wavevector(idx), u.coefficient(idx))
    });
    SpectralField::from_components(g, comps, true)
}

/// `P ∇·T` for a symmetric tensor given by its six upper-triangular
/// Fourier components (order 00, 01, 02, 11, 12, 22), masked to the 2/3 cube.
fn projected_divergence(g: &Grid, t: &[Vec<Complex64>]) -> SpectralField {
    const SLOT: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
    let comps = per_mode(g, |idx| {
        let m = g.lattice(idx);
        if !g.is_resolved(m) {
            return [Complex64::default(); 3];
        }
        let k = g.wavevector(idx);
        let mut d = [Complex64::default(); 3];
        for (i, di) in d.iter_mut().enumerate() {
            for j in 0..3 {
                *di += I * k[j] * t[SLOT[i][j]][idx];
            }
        }
        project_mode(k, d)
    });
    SpectralField::from_components(*g, comps, true)
}

const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// `(1/2) P ∇·(u⊗v + v⊗u)` with 2/3-rule dealiasing of inputs and output.
///
/// Products are formed on the physical grid; inputs are truncated to the
/// 2/3 cube first so that every retained output mode is alias-free.
pub fn nonlinear_term(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.grid().ensure_same(v.grid())?;
    let g = *u.grid();
    if u.is_zero() || v.is_zero() {
        return Ok(SpectralField::zeros(g));
    }
    let ud = u.dealiased();
    if std::ptr::eq(u, v) {
        let p = fft::inverse_real_many(&g, &[ud.component(0), ud.component(1), ud.component(2)]);
        let t: Vec<Vec<f64>> = PAIRS
            .par_iter()
            .map(|&(i, j)| p[i].iter().zip(&p[j]).map(|(a, b)| a * b).collect())
            .collect();
        let refs: Vec<&[f64]> = t.iter().map(|x| x.as_slice()).collect();
        let th = fft::forward_real_many(&g, &refs);
        return Ok(projected_divergence(&g, &th));
    }
    let vd = v.dealiased();
    let p = fft::inverse_real_many(
        &g,
        &[
            ud.component(0),
            ud.component(1),
            ud.component(2),
            vd.component(0),
            vd.component(1),
            vd.component(2),
        ],
    );
    let (pu, pv) = p.split_at(3);
    let t: Vec<Vec<f64>> = PAIRS
        .par_iter()
        .map(|&(i, j)| {
            (0..g.len())
                .map(|x| 0.5 * (pu[i][x] * pv[j][x] + pv[i][x] * pu[j][x]))
                .collect()
        })
        .collect();
    let refs: Vec<&[f64]> = t.iter().map(|x| x.as_slice()).collect();
    let th = fft::forward_real_many(&g, &refs);
    Ok(projected_divergence(&g, &th))
}

/// Physical samples of the velocity gradient, `grad[i][j] = ∂_j u_i`.
pub fn gradient_physical(u: &SpectralField) -> [[Vec<f64>; 3]; 3] {
    let g = *u.grid();
    let mut arrays = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let c: Vec<Complex64> = u
                .component(i)
                .par_iter()
                .enumerate()
                .map(|(idx, z)| I * g.wavevector(idx)[j] * z)
                .collect();
            arrays.push(c);
        }
    }
    let refs: Vec<&[Complex64]> = arrays.iter().map(|a| a.as_slice()).collect();
    let mut p = fft::inverse_real_many(&g, &refs).into_iter();
    [0, 1, 2].map(|_| [0, 1, 2].map(|_| p.next().unwrap()))
}

/// Result of a lattice dilation.
#[derive(Debug, Clone)]
pub struct RescaledField {
    pub field: SpectralField,
    /// Fraction of coefficient energy dropped because the dilated mode left
    /// the resolved lattice (or did not land on it, for contractions).
    pub truncated_fraction: f64,
}

/// Navier-Stokes dilation `u ↦ λ u(λ x)` with `λ = 2^m` on the same box.
///
/// Realised by remapping `û_λ(k) = λ û(k/λ)`; modes whose image is not a
/// resolved lattice point are dropped and their energy share reported.
pub fn rescale_field(u: &SpectralField, m: i32) -> Result<RescaledField> {
    if m.unsigned_abs() > 30 {
        return Err(Error::InvalidConfig(format!(
            "dilation exponent {m} out of range"
        )));
    }
    let g = *u.grid();
    if m == 0 {
        return Ok(RescaledField {
            field: u.clone(),
            truncated_fraction: 0.0,
        });
    }
    let lambda = 2f64.powi(m);
    let factor = 1i64 << m.unsigned_abs();
    let mut out = SpectralField::zeros(g);
    out.set_divfree(u.is_divfree());
    let total = u.coefficient_energy();
    let mut dropped = 0.0;
    {
        let comps = out.components_mut();
        for idx in 0..g.len() {
            let c = u.coefficient(idx);
            let e: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            if e == 0.0 {
                continue;
            }
            let src = g.lattice(idx);
            let target = if m > 0 {
                Some(src.map(|x| x * factor))
            } else if src.iter().all(|x| x % factor == 0) {
                Some(src.map(|x| x / factor))
            } else {
                None
            };
            match target
                .filter(|t| g.is_resolved(*t))
                .and_then(|t| g.index_of(t))
            {
                Some(t) => {
                    for a in 0..3 {
                        comps[a][t] = c[a] * lambda;
                    }
                }
                None => dropped += e,
            }
        }
    }
    let truncated_fraction = if total > 0.0 { dropped / total } else { 0.0 };
    Ok(RescaledField {
        field: out,
        truncated_fraction,
    })
}

/// Dilation onto the matched grid: same sample count, box shrunk by `λ`.
///
/// Samples of `λ u(λ x)` on the box of side `L/λ` are exactly `λ` times the
/// samples of `u` on the original box, so nothing is truncated.
pub fn rescale_matched(u: &SpectralField, m: i32) -> Result<SpectralField> {
    let lambda = 2f64.powi(m);
    let g = Grid::new(u.grid().n(), u.grid().box_length() / lambda)?;
    let comps = u
        .components()
        .clone()
        .map(|c| c.into_iter().map(|z| z * lambda).collect());
    Ok(SpectralField::from_components(g, comps, u.is_divfree()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::recipes::random_divfree;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn projector_kills_gradients() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut u = SpectralField::zeros(g);
        for (m, gh) in [([1, 2, 0], c(0.3, -0.2)), ([0, -1, 3], c(1.0, 0.5))] {
            let idx = g.index_of(m).unwrap();
            let k = g.wavevector(idx);
            u.set_mode(m, [I * k[0] * gh, I * k[1] * gh, I * k[2] * gh]);
        }
        let p = leray_project(&u);
        assert!(p.max_coefficient() < 1e-15);
    }

    #[test]
    fn projector_fixes_divergence_free_mode() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_mode([1, 1, 0], [c(1.0, 0.2), c(-1.0, -0.2), c(0.7, 0.0)]);
        let p = leray_project(&u);
        assert!(p.max_abs_diff(&u) < 1e-15);
    }

    #[test]
    fn projector_matches_dense_matrix() {
        let g = Grid::new(8, 3.0).unwrap();
        let u = random_divfree(&g, 0.0, f64::INFINITY, 0.0, 11, false);
        let p = leray_project(&u);
        for idx in 0..g.len() {
            let k = g.wavevector(idx);
            let k2: f64 = k.iter().map(|x| x * x).sum();
            let uh = u.coefficient(idx);
            for i in 0..3 {
                let mut expect = Complex64::default();
                for j in 0..3 {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let m = if k2 == 0.0 {
                        delta
                    } else {
                        delta - k[i] * k[j] / k2
                    };
                    expect += m * uh[j];
                }
                assert!((p.component(i)[idx] - expect).norm() < 1e-14);
            }
        }
        assert!(p.divergence_defect() < 1e-14);
        let pp = leray_project(&p);
        assert!(pp.max_abs_diff(&p) <= 1e-12 * u.max_coefficient());
    }

    #[test]
    fn nonlinear_is_symmetric_and_zero_on_zero() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let u = random_divfree(&g, 1.0, 4.0, 0.0, 1, true);
        let v = random_divfree(&g, 1.0, 4.0, 0.0, 2, true);
        let uv = nonlinear_term(&u, &v).unwrap();
        let vu = nonlinear_term(&v, &u).unwrap();
        assert!(uv.max_abs_diff(&vu) <= 1e-14 * uv.max_coefficient());
        let z = nonlinear_term(&SpectralField::zeros(g), &v).unwrap();
        assert!(z.is_zero());
        assert!(uv.divergence_defect() < 1e-12);
        assert!(uv.hermitian_defect() < 1e-12);
        let uu = nonlinear_term(&u, &u).unwrap();
        let uu2 = nonlinear_term(&u, &u.clone()).unwrap();
        assert!(uu.max_abs_diff(&uu2) <= 1e-14 * uu.max_coefficient());
    }

    #[test]
    fn nonlinear_two_modes_matches_convolution() {
        // u = a e^{ik1x} + cc, v = b e^{ik2x} + cc. Then
        // u⊗v has modes ±(k1+k2), ±(k1-k2) with amplitudes a b^T etc.
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let (m1, m2) = ([1i64, 0, 0], [0i64, 1, 1]);
        let a = [c(0.0, 0.0), c(0.4, 0.1), c(-0.2, 0.3)];
        let b = [c(0.5, -0.2), c(0.1, 0.0), c(-0.1, 0.0)];
        let mut u = SpectralField::zeros(g);
        let mut v = SpectralField::zeros(g);
        u.set_mode(m1, a);
        v.set_mode(m2, b);
        let out = nonlinear_term(&u, &v).unwrap();

        let mut expect = SpectralField::zeros(g);
        let conj = |x: [Complex64; 3]| x.map(|z| z.conj());
        for (su, sv) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            let au = if su > 0 { a } else { conj(a) };
            let bv = if sv > 0 { b } else { conj(b) };
            let q = [0, 1, 2].map(|i| su * m1[i] + sv * m2[i]);
            let idx = g.index_of(q).unwrap();
            let k = g.wavevector(idx);
            let mut d = [Complex64::default(); 3];
            for (i, di) in d.iter_mut().enumerate() {
                for j in 0..3 {
                    let t = 0.5 * (au[i] * bv[j] + bv[i] * au[j]);
                    *di += I * k[j] * t;
                }
            }
            let d = project_mode(k, d);
            let comps = expect.components_mut();
            for i in 0..3 {
                comps[i][idx] += d[i];
            }
        }
        assert!(out.max_abs_diff(&expect) < 1e-14);
        for idx in 0..g.len() {
            let m = g.lattice(idx);
            let on_support = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
                .iter()
                .any(|(s1, s2)| (0..3).all(|i| m[i] == s1 * m1[i] + s2 * m2[i]));
            if !on_support {
                assert!(out.coefficient(idx).iter().all(|z| z.norm() < 1e-15));
            }
        }
    }

    #[test]
    fn rescale_single_mode() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_mode([1, 0, 1], [c(0.2, 0.1), c(0.0, 0.0), c(-0.2, -0.1)]);
        let id = rescale_field(&u, 0).unwrap();
        assert_eq!(id.field, u);
        let r = rescale_field(&u, 1).unwrap();
        assert_eq!(r.truncated_fraction, 0.0);
        let idx = g.index_of([2, 0, 2]).unwrap();
        assert!((r.field.component(0)[idx] - c(0.4, 0.2)).norm() < 1e-15);
        let back = rescale_field(&r.field, -1).unwrap();
        assert!(back.field.max_abs_diff(&u) < 1e-15);
        // (1,0,1) has odd entries: contraction drops it entirely.
        let lost = rescale_field(&u, -1).unwrap();
        assert!((lost.truncated_fraction - 1.0).abs() < 1e-15);
        // Modes pushed past the 2/3 cube are reported.
        let mut w = SpectralField::zeros(g);
        w.set_mode([4, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        w.set_mode([1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let t = rescale_field(&w, 1).unwrap();
        assert!((t.truncated_fraction - 0.5).abs() < 1e-15);
    }

    #[test]
    fn matched_rescale_scales_samples() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let u = random_divfree(&g, 0.0, 3.0, 0.0, 5, true);
        let r = rescale_matched(&u, 1).unwrap();
        assert_eq!(r.grid().box_length(), PI);
        let (pu, pr) = (u.to_physical(), r.to_physical());
        for a in 0..3 {
            for i in 0..g.len() {
                assert!((pr.comps[a][i] - 2.0 * pu.comps[a][i]).abs() < 1e-13);
            }
        }
    }
}
