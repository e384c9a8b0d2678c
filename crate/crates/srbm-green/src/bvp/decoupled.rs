use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::face::FaceSolution;
use crate::error::{Error, Result};
use crate::kernel::branch_points;
use crate::model::ModelParams;
use crate::quadrature::{cauchy_integral, CauchyIntegrand, Kernel, Mode};

/// `coefficient · ∏(z − zeros) / ∏(z − poles)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub coefficient: C64,
    pub zeros: Vec<C64>,
    pub poles: Vec<C64>,
}

impl RationalFunction {
    pub fn eval(&self, z: C64) -> C64 {
        let num: C64 = self.zeros.iter().map(|a| z - a).product();
        let den: C64 = self.poles.iter().map(|a| z - a).product();
        self.coefficient * num / den
    }

    /// `1/θ`.
    pub fn reciprocal() -> Self {
        Self { coefficient: C64::new(1.0, 0.0), zeros: vec![], poles: vec![C64::new(0.0, 0.0)] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecouplingCondition {
    pub satisfied: bool,
    pub epsilon: f64,
    pub delta: f64,
}

/// Whether `ε + δ ∈ βℤ + πℤ`, scanning `|m|, |n| ≤ 8`.
pub fn decoupling_condition(p: &ModelParams) -> Result<DecouplingCondition> {
    let beta = branch_points(p)?.beta;
    // atan2 keeps the angles in (0, π) and covers a vanishing denominator.
    let epsilon = beta.sin().atan2(p.r21 * (p.sigma11 / p.sigma22).sqrt() + beta.cos());
    let delta = beta.sin().atan2(p.r12 * (p.sigma22 / p.sigma11).sqrt() + beta.cos());
    let sum = epsilon + delta;
    let satisfied = (-8..=8).any(|m: i32| {
        (-8..=8).any(|n: i32| (sum - m as f64 * beta - n as f64 * PI).abs() < 1e-9)
    });
    Ok(DecouplingCondition { satisfied, epsilon, delta })
}

/// ψ1 from a decoupling function `F` with `G(t) = F(t)/F(conj t)` on the
/// curve: `ψ1(θ2) = (1/F(θ2))·(1/2πi)∫ F(conj t) g(t) w′(t)/(w(t) − w(θ2)) dt`.
pub fn psi1_decoupled(face: &FaceSolution, f: &RationalFunction, theta2: C64) -> Result<C64> {
    let mut residual: f64 = 0.0;
    let mut values = Vec::with_capacity(face.nodes.len());
    for (j, pt) in face.grid.points.iter().enumerate() {
        let (a, b) = (f.eval(pt.z), f.eval(pt.z.conj()));
        let r = (a / b - face.boundary.G_vals[j]).norm();
        residual = if r.is_nan() { f64::INFINITY } else { residual.max(r) };
        values.push(b * face.boundary.g_vals[j]);
    }
    if residual > 1e-8 {
        return Err(Error::Contract { what: "G = F(t)/F(conj t) on the contour", residual });
    }
    if f.zeros.len() >= f.poles.len() {
        let far = f.eval(C64::new(-1e8, 0.0)).norm();
        return Err(Error::Contract { what: "F vanishes at infinity", residual: far });
    }
    if let Some(pole) = f.poles.iter().find(|z| face.contains(**z)) {
        return Err(Error::Contract { what: "F has no pole inside the domain", residual: pole.norm() });
    }
    if !face.contains(theta2) {
        return Err(Error::Domain(format!("θ2 = {theta2} lies outside the domain of the formula")));
    }
    let omega = face.gluing.w(theta2)?;
    let (distance, spacing) = face.nodes.proximity(omega);
    let mode = if distance > 3.0 * spacing { Mode::OffCurve } else { Mode::NearCurve };
    let integral = cauchy_integral(&CauchyIntegrand::new(&values, &face.nodes), omega, mode, Kernel::Plain)?;
    let at = f.eval(theta2);
    if at.norm() == 0.0 || !at.is_finite() {
        return Err(Error::Pole { what: "1/F", location: theta2 });
    }
    Ok(integral / at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::solver::{Solver, SolverOptions};
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_reflection_satisfies_the_condition() {
        let d = decoupling_condition(&ModelParams::canonical()).unwrap();
        assert!(d.satisfied);
        assert_abs_diff_eq!(d.epsilon, PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.delta, PI / 2.0, epsilon = 1e-15);
        let p = ModelParams { r12: 0.37, r21: -0.21, ..ModelParams::canonical() };
        assert!(!decoupling_condition(&p).unwrap().satisfied);
    }

    #[test]
    fn vanishing_denominator() {
        // σ12 = 0.5 gives cos β = −0.5, cancelled by r21 = 0.5.
        let p = ModelParams { sigma12: 0.5, r21: 0.5, ..ModelParams::canonical() };
        assert_abs_diff_eq!(decoupling_condition(&p).unwrap().epsilon, PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn agrees_with_the_main_formula() {
        let p = ModelParams::canonical();
        let s = Solver::new(&p, SolverOptions::default()).unwrap();
        let f = RationalFunction::reciprocal();
        for &t in &[C64::new(-1.5, 0.0), C64::new(-2.5, 1.5), C64::new(-6.0, -0.3)] {
            let a = psi1_decoupled(&s.faces[0], &f, t).unwrap();
            let b = s.psi1(t).unwrap().value;
            assert_abs_diff_eq!((a - b).norm() / b.norm(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn constant_is_not_a_decoupling_function() {
        let s = Solver::new(&ModelParams::canonical(), SolverOptions::default()).unwrap();
        let one = RationalFunction { coefficient: C64::new(1.0, 0.0), zeros: vec![], poles: vec![] };
        let e = psi1_decoupled(&s.faces[0], &one, C64::new(-1.5, 0.0));
        assert!(matches!(e, Err(Error::Contract { .. })));
    }
}
