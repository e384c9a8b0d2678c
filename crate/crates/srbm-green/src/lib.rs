//! Laplace transforms of the Green's functions of a transient reflected
//! Brownian motion in the quadrant, computed from a Carleman boundary value
//! problem, with Monte Carlo and one-dimensional cross-checks.

pub mod bvp;
pub mod curve;
pub mod dim1;
pub mod error;
pub mod gluing;
pub mod kernel;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod quadrature;

pub use error::{Error, Result};
pub use num_complex::Complex64;
