//! Heat semigroup, Duhamel integrals, the bilinear operator `B` and
//! responses to external forces.

pub mod bilinear;
pub mod force;
pub mod heat;
pub mod quadrature;

pub use bilinear::bilinear_b;
pub use force::{force_response, y_norm, ForceKind, ForceMode, ForceSpec, YNormReport};
pub use heat::{heat_flow, heat_trajectory};
pub use quadrature::{duhamel, duhamel_trajectory, integrate, QuadratureConfig, Scheme};
