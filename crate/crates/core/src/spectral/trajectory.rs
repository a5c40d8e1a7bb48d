use rayon::prelude::*;

use super::field::SpectralField;
use super::grid::Grid;
use crate::{Error, Result};

/// Time-indexed sequence of fields sharing one grid.
///
/// `times` is strictly increasing, starts at 0 and holds at least two
/// samples. Between samples the trajectory is read as piecewise linear.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<SpectralField>,
}

/// Checks the time-grid invariants shared by every trajectory.
pub fn validate_times(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::InvalidTimes(format!(
            "need at least two samples, got {}",
            times.len()
        )));
    }
    if times[0] != 0.0 {
        return Err(Error::InvalidTimes(format!(
            "first sample must be t = 0, got {}",
            times[0]
        )));
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::InvalidTimes(format!(
                "times must be strictly increasing and finite ({} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<SpectralField>) -> Result<Self> {
        validate_times(&times)?;
        if times.len() != states.len() {
            return Err(Error::InvalidTimes(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        let g = *states[0].grid();
        for s in &states[1..] {
            g.ensure_same(s.grid())?;
        }
        Ok(Self { times, states })
    }

    pub fn zeros(grid: Grid, times: Vec<f64>) -> Result<Self> {
        let states = vec![SpectralField::zeros(grid); times.len()];
        Self::new(times, states)
    }

    pub fn constant(field: &SpectralField, times: Vec<f64>) -> Result<Self> {
        let states = vec![field.clone(); times.len()];
        Self::new(times, states)
    }

    /// Samples `f(t)` on every time.
    pub fn from_fn(
        times: Vec<f64>,
        f: impl Fn(f64) -> Result<SpectralField> + Sync,
    ) -> Result<Self> {
        let states = times
            .par_iter()
            .map(|&t| f(t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(times, states)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &SpectralField {
        &self.states[i]
    }

    pub fn last(&self) -> &SpectralField {
        self.states.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn grid(&self) -> &Grid {
        self.states[0].grid()
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn is_divfree(&self) -> bool {
        self.states.iter().all(|s| s.is_divfree())
    }

    /// Linear interpolation between samples.
    pub fn at(&self, t: f64) -> Result<SpectralField> {
        let (i, w) = self.locate(t)?;
        if w == 0.0 {
            return Ok(self.states[i].clone());
        }
        self.states[i].combine(1.0 - w, &self.states[i + 1], w)
    }

    /// Interval index `i` and weight `w` with `t = (1-w) t_i + w t_{i+1}`.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let end = self.end_time();
        if !(0.0..=end).contains(&t) {
            return Err(Error::TimeOutOfRange { t, start: 0.0, end });
        }
        let i = match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return Ok((i.min(self.len() - 1), 0.0)),
            Err(i) => i - 1,
        };
        let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        Ok((i, w))
    }

    pub fn ensure_compatible(&self, other: &Trajectory) -> Result<()> {
        self.grid().ensure_same(other.grid())?;
        if self.times != other.times {
            return Err(Error::InvalidTimes(
                "trajectories use different time grids".into(),
            ));
        }
        Ok(())
    }

    /// `a * self + b * other`, sample by sample.
    pub fn combine(&self, a: f64, other: &Trajectory, b: f64) -> Result<Self> {
        self.ensure_compatible(other)?;
        let states = self
            .states
            .iter()
            .zip(&other.states)
            .map(|(x, y)| x.combine(a, y, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            times: self.times.clone(),
            states,
        })
    }

    pub fn add(&self, other: &Trajectory) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            times: self.times.clone(),
            states: self.states.iter().map(|x| x.scaled(s)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&SpectralField) -> SpectralField + Sync + Send) -> Self {
        Self {
            times: self.times.clone(),
            states: self.states.par_iter().map(f).collect(),
        }
    }

    /// Keeps the samples with `t <= t_end` (at least two).
    pub fn truncated(&self, t_end: f64) -> Result<Self> {
        let k = self.times.iter().take_while(|&&t| t <= t_end).count();
        if k < 2 {
            return Err(Error::InvalidTimes(format!(
                "horizon {t_end} keeps fewer than two samples"
            )));
        }
        Ok(Self {
            times: self.times[..k].to_vec(),
            states: self.states[..k].to_vec(),
        })
    }

    /// `‖u(t)‖_{L^2}` at every sample.
    pub fn l2_series(&self) -> Vec<f64> {
        self.states.par_iter().map(|s| s.l2_norm()).collect()
    }

    pub fn sup_l2(&self) -> f64 {
        self.l2_series().into_iter().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.states.iter().all(|s| s.is_zero())
    }
}

/// Uniform grid `0, T/(m-1), ..., T` with `m` samples.
pub fn uniform_times(horizon: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 || !(horizon > 0.0) {
        return Err(Error::InvalidTimes(format!(
            "uniform grid needs >= 2 samples and a positive horizon (got {samples}, {horizon})"
        )));
    }
    let mut t: Vec<f64> = (0..samples)
        .map(|i| horizon * i as f64 / (samples - 1) as f64)
        .collect();
    t[samples - 1] = horizon;
    Ok(t)
}

/// `0` followed by `samples - 1` geometrically spaced points from `first`
/// to `horizon`.
pub fn geometric_times(first: f64, horizon: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 3 || !(first > 0.0) || !(horizon > first) {
        return Err(Error::InvalidTimes(format!(
            "geometric grid needs >= 3 samples and 0 < first < horizon (got {samples}, {first}, {horizon})"
        )));
    }
    let m = samples - 1;
    let ratio = (horizon / first).powf(1.0 / (m - 1) as f64);
    let mut t = vec![0.0];
    t.extend((0..m).map(|i| first * ratio.powi(i as i32)));
    t[samples - 1] = horizon;
    validate_times(&t)?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_validation() {
        assert!(validate_times(&[0.0]).is_err());
        assert!(validate_times(&[0.1, 0.2]).is_err());
        assert!(validate_times(&[0.0, 0.2, 0.2]).is_err());
        assert!(validate_times(&[0.0, 0.1, 0.3]).is_ok());
        let g = geometric_times(1e-3, 1.0, 7).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 1e-3).abs() < 1e-18);
        assert_eq!(*g.last().unwrap(), 1.0);
        let r1 = g[3] / g[2];
        let r2 = g[5] / g[4];
        assert!((r1 - r2).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_linear() {
        let grid = Grid::new(8, 1.0).unwrap();
        let mut a = SpectralField::zeros(grid);
        a.set_mode(
            [1, 0, 0],
            [
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
            ],
        );
        let b = a.scaled(3.0);
        let traj = Trajectory::new(vec![0.0, 2.0], vec![a.clone(), b]).unwrap();
        let mid = traj.at(0.5).unwrap();
        let expect = a.scaled(1.5);
        assert!(mid.max_abs_diff(&expect) < 1e-15);
        assert!(traj.at(2.5).is_err());
    }
}
