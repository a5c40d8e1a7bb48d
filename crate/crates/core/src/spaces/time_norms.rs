use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::besov::{band_lp_norms, lp_norm, lq_sum, s_p, BesovIndex};
use crate::spectral::Trajectory;
use crate::{Error, Result};

/// Chemin-Lerner norm request `L̃^ρ([t1, t2]; Ḃ^s_{p,q})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeNormSpec {
    pub besov: BesovIndex,
    pub rho: f64,
    pub interval: (f64, f64),
}

impl TimeNormSpec {
    pub fn new(besov: BesovIndex, rho: f64, interval: (f64, f64)) -> Result<Self> {
        if rho.is_nan() || rho < 1.0 {
            return Err(Error::InvalidExponent(format!(
                "time exponent {rho} must be >= 1"
            )));
        }
        if !(interval.0 < interval.1) || interval.0 < 0.0 {
            return Err(Error::InvalidTimes(format!(
                "interval [{}, {}] must satisfy 0 <= t1 < t2",
                interval.0, interval.1
            )));
        }
        Ok(Self {
            besov,
            rho,
            interval,
        })
    }
}

/// `‖g‖_{L^ρ(t1, t2)}` of a sampled nonnegative function, trapezoid in time
/// with linear interpolation at interval endpoints that are not samples.
pub fn time_lebesgue(times: &[f64], values: &[f64], rho: f64, t1: f64, t2: f64) -> Result<f64> {
    let end = *times.last().unwrap();
    if t1 < times[0] || t2 > end || !(t1 < t2) {
        return Err(Error::TimeOutOfRange {
            t: if t1 < times[0] { t1 } else { t2 },
            start: times[0],
            end,
        });
    }
    let interp = |t: f64| -> f64 {
        match times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => values[i],
            Err(i) => {
                let w = (t - times[i - 1]) / (times[i] - times[i - 1]);
                (1.0 - w) * values[i - 1] + w * values[i]
            }
        }
    };
    let mut pts = vec![(t1, interp(t1))];
    for (t, v) in times.iter().zip(values) {
        if *t > t1 && *t < t2 {
            pts.push((*t, *v));
        }
    }
    pts.push((t2, interp(t2)));
    if rho.is_infinite() {
        return Ok(pts.iter().fold(0.0, |m, &(_, v)| m.max(v)));
    }
    let integral: f64 = pts
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1.powf(rho) + w[1].1.powf(rho)))
        .sum();
    Ok(integral.powf(1.0 / rho))
}

/// `‖Δ_j u(t)‖_{L^p}` for every sample time and band, computed once and
/// reused for any `(s, q, ρ, interval)`.
#[derive(Debug, Clone)]
pub struct BandProfile {
    pub p: f64,
    pub times: Vec<f64>,
    pub bands: Vec<i32>,
    /// `norms[m][b]` for time `m` and band `bands[b]`.
    pub norms: Vec<Vec<f64>>,
}

impl BandProfile {
    pub fn of(traj: &Trajectory, p: f64) -> Self {
        let per_time: Vec<Vec<(i32, f64)>> = traj
            .states()
            .par_iter()
            .map(|s| band_lp_norms(s, p))
            .collect();
        let bands = per_time[0].iter().map(|(j, _)| *j).collect();
        let norms = per_time
            .into_iter()
            .map(|v| v.into_iter().map(|(_, a)| a).collect())
            .collect();
        Self {
            p,
            times: traj.times().to_vec(),
            bands,
            norms,
        }
    }

    /// `‖2^{js} ‖Δ_j u‖_{L^ρ L^p}‖_{ℓ^q}` on `[t1, t2]`.
    pub fn chemin_lerner(&self, s: f64, q: f64, rho: f64, interval: (f64, f64)) -> Result<f64> {
        let mut per_band = Vec::with_capacity(self.bands.len());
        for (b, &j) in self.bands.iter().enumerate() {
            let series: Vec<f64> = self.norms.iter().map(|row| row[b]).collect();
            let t = time_lebesgue(&self.times, &series, rho, interval.0, interval.1)?;
            per_band.push((j as f64 * s).exp2() * t);
        }
        Ok(lq_sum(per_band, q))
    }

    /// `𝕃^{a:b}_p` on `[0, t_end]`: the larger of the `L̃^a(Ḃ^{s_p+2/a}_{p,p})`
    /// and `L̃^b(Ḃ^{s_p+2/b}_{p,p})` norms.
    pub fn critical_pair(&self, a: f64, b: f64, t_end: f64) -> Result<f64> {
        let sp = s_p(self.p);
        let na = self.chemin_lerner(sp + 2.0 / a, self.p, a, (0.0, t_end))?;
        let nb = self.chemin_lerner(sp + 2.0 / b, self.p, b, (0.0, t_end))?;
        Ok(na.max(nb))
    }
}

/// `‖u‖_{L̃^ρ([t1,t2]; Ḃ^s_{p,q})}`.
pub fn time_besov_norm(traj: &Trajectory, spec: &TimeNormSpec) -> Result<f64> {
    let (t1, t2) = spec.interval;
    if t2 > traj.end_time() {
        return Err(Error::TimeOutOfRange {
            t: t2,
            start: 0.0,
            end: traj.end_time(),
        });
    }
    BandProfile::of(traj, spec.besov.p).chemin_lerner(
        spec.besov.s,
        spec.besov.q,
        spec.rho,
        (t1, t2),
    )
}

/// `‖u‖_{𝕃^{a:b}_p(T)}` with `T` the trajectory's end time.
pub fn critical_pair_norm(traj: &Trajectory, p: f64, a: f64, b: f64) -> Result<f64> {
    BandProfile::of(traj, p).critical_pair(a, b, traj.end_time())
}

/// Kato weight exponent `1/2 - 3/(2p)`.
pub fn kato_exponent(p: f64) -> f64 {
    0.5 - 1.5 / p
}

/// `sup_t t^{1/2 - 3/(2p)} ‖u(t)‖_{L^p}` over the trajectory samples.
pub fn kato_norm(traj: &Trajectory, p: f64) -> Result<f64> {
    if p.is_nan() || p < 3.0 {
        return Err(Error::InvalidExponent(format!(
            "Kato exponent p = {p} must be >= 3"
        )));
    }
    let e = kato_exponent(p);
    let vals: Vec<f64> = traj
        .times()
        .par_iter()
        .zip(traj.states().par_iter())
        .map(|(&t, s)| {
            let w = if e == 0.0 { 1.0 } else { t.powf(e) };
            if w == 0.0 {
                0.0
            } else {
                w * lp_norm(s, p)
            }
        })
        .collect();
    Ok(vals.into_iter().fold(0.0, f64::max))
}
