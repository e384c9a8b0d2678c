//! The Carleman boundary value problem for the boundary transforms.
//!
//! On the lower half `ℛ⁻` of the hyperbola the boundary condition reads
//! `ψ1(conj t) = G(t)ψ1(t) + g(t)`. The gluing map sends conjugate points to
//! one point of `(−∞, −1]`, turning it into a Riemann problem solved with
//! Cauchy integrals.

mod boundary;
mod decoupled;
mod face;
mod solver;

pub use boundary::{boundary_data, g_fn, index_chi, winding_check, BoundaryData, G_fn};
pub use decoupled::{decoupling_condition, psi1_decoupled, DecouplingCondition, RationalFunction};
pub use face::FaceSolution;
pub use solver::{psi1, psi2, psi_interior, Evaluation, Method, Solver, SolverOptions};
