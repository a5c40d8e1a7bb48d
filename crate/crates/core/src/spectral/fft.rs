//! Cached 3-D complex FFTs built from rustfft 1-D plans.
//!
//! Real fields are transformed two at a time by packing them into the real
//! and imaginary parts of one complex array.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Fft3>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn plan(n: usize) -> Arc<Fft3> {
    let mut map = cache().lock().expect("fft cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    /// Unnormalised forward transform, `X_k = Σ_j x_j e^{-2πi jk/n}` per axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Unnormalised inverse transform, `x_j = Σ_k X_k e^{+2πi jk/n}` per axis.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let plane = n * n;
        assert_eq!(data.len(), plane * n);

        // z: contiguous lines.
        data.par_chunks_mut(plane).for_each(|p| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(p, &mut scratch);
        });

        // y: transpose each x-plane.
        data.par_chunks_mut(plane).for_each(|p| {
            let mut t = vec![Complex64::default(); plane];
            for iy in 0..n {
                for iz in 0..n {
                    t[iz * n + iy] = p[iy * n + iz];
                }
            }
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(&mut t, &mut scratch);
            for iy in 0..n {
                for iz in 0..n {
                    p[iy * n + iz] = t[iz * n + iy];
                }
            }
        });

        // x: gather into (iy, iz, ix) order, transform, scatter back.
        let mut t = vec![Complex64::default(); plane * n];
        {
            let src = &*data;
            t.par_chunks_mut(plane).enumerate().for_each(|(iy, chunk)| {
                for iz in 0..n {
                    for ix in 0..n {
                        chunk[iz * n + ix] = src[(ix * n + iy) * n + iz];
                    }
                }
                let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(chunk, &mut scratch);
            });
        }
        data.par_chunks_mut(plane).enumerate().for_each(|(ix, p)| {
            for iy in 0..n {
                for iz in 0..n {
                    p[iy * n + iz] = t[(iy * n + iz) * n + ix];
                }
            }
        });
    }
}

/// Forward transforms of two real arrays with one complex FFT; output is
/// normalised by `1/n^3` so that `a(x) = Σ_k â(k) e^{ik·x}`.
pub(crate) fn forward_real_pair(
    grid: &Grid,
    a: &[f64],
    b: &[f64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut z: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    plan(grid.n()).forward(&mut z);
    let scale = 1.0 / grid.len() as f64;
    let mut out_a = vec![Complex64::default(); z.len()];
    let mut out_b = vec![Complex64::default(); z.len()];
    out_a
        .par_iter_mut()
        .zip(out_b.par_iter_mut())
        .enumerate()
        .for_each(|(idx, (oa, ob))| {
            let zk = z[idx];
            let zm = z[grid.mirror(idx)].conj();
            *oa = (zk + zm) * (0.5 * scale);
            // (zk - zm) / (2i)
            let d = (zk - zm) * (0.5 * scale);
            *ob = Complex64::new(d.im, -d.re);
        });
    (out_a, out_b)
}

/// Forward transform of a single real array.
pub(crate) fn forward_real(grid: &Grid, a: &[f64]) -> Vec<Complex64> {
    let mut z: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    plan(grid.n()).forward(&mut z);
    let scale = 1.0 / grid.len() as f64;
    z.iter_mut().for_each(|c| *c *= scale);
    z
}

/// Inverse transforms of two Hermitian coefficient arrays, returning the
/// real samples of each.
pub(crate) fn inverse_real_pair(
    grid: &Grid,
    a: &[Complex64],
    b: &[Complex64],
) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| x + i * y).collect();
    plan(grid.n()).inverse(&mut z);
    (
        z.iter().map(|c| c.re).collect(),
        z.iter().map(|c| c.im).collect(),
    )
}

pub(crate) fn inverse_real(grid: &Grid, a: &[Complex64]) -> Vec<f64> {
    let mut z = a.to_vec();
    plan(grid.n()).inverse(&mut z);
    z.iter().map(|c| c.re).collect()
}

/// Inverse-transforms an arbitrary list of Hermitian coefficient arrays,
/// pairing them to halve the number of FFTs.
pub(crate) fn inverse_real_many(grid: &Grid, arrays: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(arrays.len());
    let mut chunks = arrays.chunks(2);
    for chunk in &mut chunks {
        if chunk.len() == 2 {
            let (x, y) = inverse_real_pair(grid, chunk[0], chunk[1]);
            out.push(x);
            out.push(y);
        } else {
            out.push(inverse_real(grid, chunk[0]));
        }
    }
    out
}

/// Forward counterpart of [`inverse_real_many`].
pub(crate) fn forward_real_many(grid: &Grid, arrays: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(arrays.len());
    for chunk in arrays.chunks(2) {
        if chunk.len() == 2 {
            let (x, y) = forward_real_pair(grid, chunk[0], chunk[1]);
            out.push(x);
            out.push(y);
        } else {
            out.push(forward_real(grid, chunk[0]));
        }
    }
    out
}
