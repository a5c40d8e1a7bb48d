use super::quadrature::{integrate, QuadratureConfig};
use crate::spectral::{nonlinear_term, Trajectory};
use crate::Result;

/// `B(u,v)(t) = -∫_0^t e^{(t-s)Δ} (1/2) P∇·(u⊗v + v⊗u)(s) ds` at every
/// sample time of the inputs.
///
/// Inputs are interpolated linearly to the quadrature nodes and the
/// nonlinearity is evaluated there, so the result is exactly bilinear and
/// symmetric in `(u, v)`.
pub fn bilinear_b(u: &Trajectory, v: &Trajectory, q: &QuadratureConfig) -> Result<Trajectory> {
    u.ensure_compatible(v)?;
    if u.is_zero() || v.is_zero() {
        return Trajectory::zeros(*u.grid(), u.times().to_vec());
    }
    let same = std::ptr::eq(u, v);
    let ys = integrate(u.grid(), u.times(), q, |t| {
        let a = u.at(t)?;
        if same {
            nonlinear_term(&a, &a)
        } else {
            nonlinear_term(&a, &v.at(t)?)
        }
    })?;
    let states = ys
        .into_iter()
        .map(|mut y| {
            y.scale(-1.0);
            y.set_divfree(true);
            y
        })
        .collect();
    Trajectory::new(u.times().to_vec(), states)
}
