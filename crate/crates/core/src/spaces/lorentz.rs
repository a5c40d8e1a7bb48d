//! Lorentz quasi-norms via the discrete decreasing rearrangement.
//!
//! On the grid `|u|` is a simple function: sample `i` contributes a step of
//! width `ΔV` (the cell volume). After sorting the magnitudes decreasingly
//! into `a_1 ≥ a_2 ≥ ...` with cumulative volumes `V_m = m ΔV`,
//!
//! * `‖u‖_{L^{p,∞}} = sup_m V_m^{1/p} a_m`
//! * `‖u‖_{L^{p,q}}^q = Σ_m a_m^q (V_m^{q/p} - V_{m-1}^{q/p})`
//!
//! which is the exact value of `(q/p) ∫ (t^{1/p} u*(t))^q dt/t` for a step
//! function, so `L^{p,p}` coincides with `L^p`.

use super::besov::lp_of_values;
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Lorentz norm of nonnegative samples with uniform cell volume.
pub fn lorentz_of_values(values: &[f64], cell_volume: f64, p: f64, q: f64) -> Result<f64> {
    if !(p > 1.0) || p.is_infinite() {
        return Err(Error::InvalidExponent(format!(
            "Lorentz exponent p = {p} must lie in (1, ∞)"
        )));
    }
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidExponent(format!(
            "Lorentz exponent q = {q} must be >= 1"
        )));
    }
    let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    if q.is_infinite() {
        let mut best: f64 = 0.0;
        for (m, a) in sorted.iter().enumerate() {
            let v = ((m + 1) as f64 * cell_volume).powf(1.0 / p) * a;
            best = best.max(v);
        }
        return Ok(best);
    }
    if q == p {
        return Ok(lp_of_values(&sorted, cell_volume, p));
    }
    let e = q / p;
    let mut acc = 0.0;
    let mut prev = 0.0;
    for (m, a) in sorted.iter().enumerate() {
        let cur = ((m + 1) as f64 * cell_volume).powf(e);
        acc += a.powf(q) * (cur - prev);
        prev = cur;
    }
    Ok(acc.powf(1.0 / q))
}

/// `‖u‖_{L^{p,q}}` of the pointwise magnitude of a field.
pub fn lorentz_norm(u: &SpectralField, p: f64, q: f64) -> Result<f64> {
    let phys = u.to_physical();
    lorentz_of_values(&phys.magnitude(), u.grid().cell_volume(), p, q)
}

/// `‖u‖_{L^{3,∞}}`.
pub fn weak_l3(u: &SpectralField) -> f64 {
    lorentz_norm(u, 3.0, f64::INFINITY).expect("valid exponents")
}
