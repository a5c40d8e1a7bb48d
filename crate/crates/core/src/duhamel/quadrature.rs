use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spectral::{validate_times, Grid, SpectralField, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Source linear on each substep, integrated exactly against the kernel.
    #[default]
    IntegratingFactorTrapezoid,
    /// Source frozen at the substep midpoint.
    IntegratingFactorMidpoint,
}

/// Time discretisation of `∫_0^t e^{(t-s)Δ} g(s) ds`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub substeps: usize,
    #[serde(default)]
    pub scheme: Scheme,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            substeps: 4,
            scheme: Scheme::IntegratingFactorTrapezoid,
        }
    }
}

impl QuadratureConfig {
    pub fn new(substeps: usize, scheme: Scheme) -> Result<Self> {
        let q = Self { substeps, scheme };
        q.validate()?;
        Ok(q)
    }

    pub fn trapezoid(substeps: usize) -> Result<Self> {
        Self::new(substeps, Scheme::IntegratingFactorTrapezoid)
    }

    pub fn midpoint(substeps: usize) -> Result<Self> {
        Self::new(substeps, Scheme::IntegratingFactorMidpoint)
    }

    pub fn validate(&self) -> Result<()> {
        if self.substeps == 0 {
            return Err(Error::InvalidConfig(
                "quadrature needs at least one substep".into(),
            ));
        }
        Ok(())
    }
}

/// `(1 - e^{-z}) / z`.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -(-z).exp_m1() / z
    }
}

/// `∫_0^1 x e^{-z x} dx = (1 - (1+z) e^{-z}) / z^2`.
pub fn phi_lin(z: f64) -> f64 {
    if z.abs() < 0.1 {
        // (-z)^n / (n! (n+2))
        let mut term = 1.0;
        let mut sum = 0.5;
        for n in 1..16 {
            term *= -z / n as f64;
            sum += term / (n + 2) as f64;
        }
        sum
    } else {
        (-(-z).exp_m1() - z * (-z).exp()) / (z * z)
    }
}

/// Per-mode weights of one substep of length `h` for decay rate `kappa`.
///
/// The update is `y(b) = decay·y(a) + w_a g(a) + w_b g(b)` for the
/// trapezoid scheme and `y(b) = decay·y(a) + w_m g(mid)` for the midpoint one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepWeights {
    pub decay: f64,
    pub w_a: f64,
    pub w_b: f64,
    pub w_m: f64,
}

impl StepWeights {
    pub fn new(kappa: f64, h: f64) -> Self {
        let z = kappa * h;
        let p1 = phi1(z);
        let pl = phi_lin(z);
        Self {
            decay: (-z).exp(),
            w_a: h * pl,
            w_b: h * (p1 - pl),
            w_m: h * p1,
        }
    }
}

/// Integrates `y' = Δy + g(t)`, `y(0) = 0`, over `times` and returns `y` at
/// every time. `source(t)` is queried at the substep nodes of each interval;
/// the last node of an interval is reused as the first of the next.
pub fn integrate<F>(
    grid: &Grid,
    times: &[f64],
    q: &QuadratureConfig,
    source: F,
) -> Result<Vec<SpectralField>>
where
    F: Fn(f64) -> Result<SpectralField> + Sync,
{
    validate_times(times)?;
    q.validate()?;
    let s = q.substeps;
    let k2 = grid.k_squared();
    let mut y: [Vec<Complex64>; 3] = [0, 1, 2].map(|_| vec![Complex64::default(); grid.len()]);
    let mut out = Vec::with_capacity(times.len());
    out.push(SpectralField::zeros(*grid));
    let mut carry: Option<SpectralField> = None;

    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = (t1 - t0) / s as f64;
        let node = |k: usize| if k == s { t1 } else { t0 + h * k as f64 };
        let weights: Vec<StepWeights> = k2.par_iter().map(|&k| StepWeights::new(k, h)).collect();
        match q.scheme {
            Scheme::IntegratingFactorTrapezoid => {
                let first = match carry.take() {
                    Some(g) => g,
                    None => source(t0)?,
                };
                let rest: Vec<SpectralField> = (1..=s)
                    .into_par_iter()
                    .map(|k| source(node(k)))
                    .collect::<Result<_>>()?;
                let mut prev = &first;
                for g in &rest {
                    check_grid(grid, g)?;
                    for (a, ya) in y.iter_mut().enumerate() {
                        let (ga, gb) = (prev.component(a), g.component(a));
                        ya.par_iter_mut().enumerate().for_each(|(i, v)| {
                            let wt = &weights[i];
                            *v = *v * wt.decay + ga[i] * wt.w_a + gb[i] * wt.w_b;
                        });
                    }
                    prev = g;
                }
                carry = rest.into_iter().last();
            }
            Scheme::IntegratingFactorMidpoint => {
                let mids: Vec<SpectralField> = (0..s)
                    .into_par_iter()
                    .map(|k| source(t0 + h * (k as f64 + 0.5)))
                    .collect::<Result<_>>()?;
                for g in &mids {
                    check_grid(grid, g)?;
                    for (a, ya) in y.iter_mut().enumerate() {
                        let gm = g.component(a);
                        ya.par_iter_mut().enumerate().for_each(|(i, v)| {
                            let wt = &weights[i];
                            *v = *v * wt.decay + gm[i] * wt.w_m;
                        });
                    }
                }
            }
        }
        out.push(SpectralField::from_components(*grid, y.clone(), false));
    }
    Ok(out)
}

fn check_grid(grid: &Grid, g: &SpectralField) -> Result<()> {
    grid.ensure_same(g.grid())
}

/// `∫_0^t e^{(t-s)Δ} f(s) ds` for a sampled source, read as piecewise
/// linear between its samples.
pub fn duhamel(source: &Trajectory, t: f64, q: &QuadratureConfig) -> Result<SpectralField> {
    let end = source.end_time();
    if !(0.0..=end).contains(&t) {
        return Err(Error::TimeOutOfRange { t, start: 0.0, end });
    }
    if t == 0.0 {
        return Ok(SpectralField::zeros(*source.grid()));
    }
    let mut grid_times: Vec<f64> = source
        .times()
        .iter()
        .copied()
        .take_while(|&x| x < t)
        .collect();
    grid_times.push(t);
    let ys = integrate(source.grid(), &grid_times, q, |s| source.at(s))?;
    let mut y = ys.into_iter().last().unwrap();
    y.set_divfree(source.is_divfree());
    Ok(y)
}

/// Duhamel integral of a sampled source at every one of its sample times.
pub fn duhamel_trajectory(source: &Trajectory, q: &QuadratureConfig) -> Result<Trajectory> {
    let mut ys = integrate(source.grid(), source.times(), q, |s| source.at(s))?;
    for y in &mut ys {
        y.set_divfree(source.is_divfree());
    }
    Trajectory::new(source.times().to_vec(), ys)
}
