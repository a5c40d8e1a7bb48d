use crate::duhamel::{bilinear_b, QuadratureConfig};
use crate::spectral::Trajectory;
use crate::Result;

/// Linear map on trajectories (the `L` of the fixed-point problem).
pub trait LinearOperator: Sync {
    fn apply(&self, x: &Trajectory) -> Result<Trajectory>;

    /// Lets the solver skip the call entirely.
    fn is_zero(&self) -> bool {
        false
    }
}

/// Symmetric bilinear map on trajectories (the `B` of the fixed-point problem).
pub trait BilinearOperator: Sync {
    fn apply(&self, x: &Trajectory, y: &Trajectory) -> Result<Trajectory>;
}

pub struct ZeroOperator;

impl LinearOperator for ZeroOperator {
    fn apply(&self, x: &Trajectory) -> Result<Trajectory> {
        Trajectory::zeros(*x.grid(), x.times().to_vec())
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// `scale · B(x, y)` with the Navier-Stokes bilinear operator.
pub struct NsBilinear {
    pub quadrature: QuadratureConfig,
    pub scale: f64,
}

impl NsBilinear {
    pub fn new(quadrature: QuadratureConfig) -> Self {
        Self {
            quadrature,
            scale: 1.0,
        }
    }
}

impl BilinearOperator for NsBilinear {
    fn apply(&self, x: &Trajectory, y: &Trajectory) -> Result<Trajectory> {
        let b = bilinear_b(x, y, &self.quadrature)?;
        Ok(if self.scale == 1.0 {
            b
        } else {
            b.scaled(self.scale)
        })
    }
}

/// `v ↦ 2 B(U, v)` for a frozen drift `U`.
pub struct DriftOperator {
    pub drift: Trajectory,
    pub quadrature: QuadratureConfig,
}

impl LinearOperator for DriftOperator {
    fn apply(&self, x: &Trajectory) -> Result<Trajectory> {
        Ok(bilinear_b(&self.drift, x, &self.quadrature)?.scaled(2.0))
    }

    fn is_zero(&self) -> bool {
        self.drift.is_zero()
    }
}
