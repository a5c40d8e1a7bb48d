use crate::spectral::{SpectralField, Trajectory};
use crate::{Error, Result};

/// `e^{tΔ} u`: every mode is multiplied by `e^{-|k|^2 t}`.
pub fn heat_flow(u: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidTimes(format!(
            "heat flow needs t >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(u.clone());
    }
    let g = *u.grid();
    Ok(u.map_modes(|idx| {
        let k = g.wavevector(idx);
        (-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * t).exp()
    }))
}

/// Heat flow of `u` sampled on `times`.
pub fn heat_trajectory(u: &SpectralField, times: &[f64]) -> Result<Trajectory> {
    Trajectory::from_fn(times.to_vec(), |t| heat_flow(u, t))
}
