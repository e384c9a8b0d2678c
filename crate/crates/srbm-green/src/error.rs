use num_complex::Complex64;
use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("pole of {what} at {location}")]
    Pole { what: &'static str, location: Complex64 },

    #[error("removable singularity at ({}, {}); evaluate at a perturbed point", .theta.0, .theta.1)]
    Removable { theta: (Complex64, Complex64) },

    #[error("truncated tail bound {achieved:e} exceeds tolerance {requested:e}")]
    Truncation { achieved: f64, requested: f64 },

    #[error("point at distance {distance:e} from the contour (spacing {spacing:e}); use near-curve or principal-value mode")]
    Proximity { distance: f64, spacing: f64 },

    #[error("phase jump of {jump:.3} rad between samples {index} and {}; refine the grid", .index + 1)]
    Resolution { index: usize, jump: f64 },

    #[error("no complementary reflection exists for this step; check the existence condition on R")]
    ReflectionFailure,

    #[error("contract violated: {what} (max residual {residual:e})")]
    Contract { what: &'static str, residual: f64 },

    #[error("free constant of the solution is not determined by the available conditions")]
    UndeterminedConstant,

    #[error("process is not transient")]
    NotTransient,
}

pub type Result<T> = std::result::Result<T, Error>;
