//! Pseudo-spectral toolkit for mild solutions of the forced incompressible
//! Navier-Stokes equations on a periodic box.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: grids, Fourier-coefficient vector fields, FFTs, the Leray
//!   projector, the dealiased quadratic nonlinearity and dilations.
//! * [`spaces`]: Littlewood-Paley blocks and the Besov, Chemin-Lerner, Kato
//!   and Lorentz norms.
//! * [`duhamel`]: heat semigroup, Duhamel integrals, the bilinear operator
//!   `B` and external-force responses.
//! * [`picard`]: the abstract fixed-point engine and the forced solver built
//!   on top of it.
//! * [`expansion`]: symbolic iteration of the perturbation equation into
//!   heat, drift and remainder buckets.

pub mod duhamel;
pub mod error;
pub mod expansion;
pub mod picard;
pub mod spaces;
pub mod spectral;

pub use error::{Error, Result};
