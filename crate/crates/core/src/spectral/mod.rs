//! Periodic-box Fourier representation of real vector fields.

pub(crate) mod fft;
pub mod field;
pub mod grid;
pub mod ops;
pub mod recipes;
pub mod snapshot;
pub mod trajectory;

pub use field::{PhysicalField, SpectralField};
pub use grid::{make_grid, Grid};
pub use ops::{
    gradient_physical, leray_project, nonlinear_term, rescale_field, rescale_matched, RescaledField,
};
pub use recipes::{random_divfree, FieldRecipe, Normalization};
pub use trajectory::{geometric_times, uniform_times, validate_times, Trajectory};
