//! The kernel polynomial, its algebraic branches and the distinguished
//! points of the ellipse `γ = 0`.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::model::ModelParams;

/// `½ θ·Σθ + θ·μ`.
pub fn gamma(p: &ModelParams, t1: C64, t2: C64) -> C64 {
    0.5 * (p.sigma11 * t1 * t1 + 2.0 * p.sigma12 * t1 * t2 + p.sigma22 * t2 * t2)
        + p.mu1 * t1
        + p.mu2 * t2
}

/// Reflection form of face 1: `θ1 + r21 θ2`.
pub fn gamma1(p: &ModelParams, t1: C64, t2: C64) -> C64 {
    t1 + p.r21 * t2
}

/// Reflection form of face 2: `r12 θ1 + θ2`.
pub fn gamma2(p: &ModelParams, t1: C64, t2: C64) -> C64 {
    p.r12 * t1 + t2
}

/// Which root of the quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Branch points, intersection points and the opening angle of the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGeometry {
    pub theta1_minus: f64,
    pub theta1_plus: f64,
    pub theta2_minus: f64,
    pub theta2_plus: f64,
    /// Nonzero point of the ellipse on `γ1 = 0`.
    pub theta_star: (f64, f64),
    /// Nonzero point of the ellipse on `γ2 = 0`.
    pub theta_star_star: (f64, f64),
    /// The line `γ1 = 0` is tangent to the ellipse at the origin.
    pub star_degenerate: bool,
    /// The line `γ2 = 0` is tangent to the ellipse at the origin.
    pub star_star_degenerate: bool,
    /// `arccos(−σ12/√(σ11σ22))`, in `(0, π)`.
    pub beta: f64,
}

fn root_pair(b: f64, mu: f64, det: f64) -> (f64, f64) {
    let s = (b * b + mu * mu * det).sqrt();
    ((b - s) / det, (b + s) / det)
}

/// Branch points in both variables, the angle β and the intersection points.
pub fn branch_points(p: &ModelParams) -> Result<KernelGeometry> {
    p.check()?;
    let det = p.det_sigma();
    let (theta1_minus, theta1_plus) = root_pair(p.mu2 * p.sigma12 - p.mu1 * p.sigma22, p.mu2, det);
    let (theta2_minus, theta2_plus) = root_pair(p.mu1 * p.sigma12 - p.mu2 * p.sigma11, p.mu1, det);
    let beta = (-p.sigma12 / (p.sigma11 * p.sigma22).sqrt()).clamp(-1.0, 1.0).acos();
    let ip = intersection_points(p);
    Ok(KernelGeometry {
        theta1_minus,
        theta1_plus,
        theta2_minus,
        theta2_plus,
        theta_star: ip.theta_star,
        theta_star_star: ip.theta_star_star,
        star_degenerate: ip.star_degenerate,
        star_star_degenerate: ip.star_star_degenerate,
        beta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intersections {
    pub theta_star: (f64, f64),
    pub theta_star_star: (f64, f64),
    pub star_degenerate: bool,
    pub star_star_degenerate: bool,
}

/// Points of the ellipse on the lines `γ1 = 0` and `γ2 = 0` other than the
/// origin. A tangent line yields the origin with the degeneracy flag set.
pub fn intersection_points(p: &ModelParams) -> Intersections {
    // On θ1 = c·θ2 the kernel is θ2·(a θ2 + b); the nonzero root is −b/a.
    let line_root = |a: f64, b: f64| if b == 0.0 { (0.0, true) } else { (-b / a, false) };

    let c = -p.r21;
    let a = 0.5 * (p.sigma11 * c * c + 2.0 * p.sigma12 * c + p.sigma22);
    let (t2, star_degenerate) = line_root(a, p.mu1 * c + p.mu2);
    let theta_star = (c * t2, t2);

    let c = -p.r12;
    let a = 0.5 * (p.sigma11 + 2.0 * p.sigma12 * c + p.sigma22 * c * c);
    let (t1, star_star_degenerate) = line_root(a, p.mu1 + p.mu2 * c);
    let theta_star_star = (t1, c * t1);

    Intersections { theta_star, theta_star_star, star_degenerate, star_star_degenerate }
}

fn positive_zero(z: C64) -> C64 {
    // Keeps real arguments on the upper lip of the cut.
    if z.im == 0.0 {
        C64::new(z.re, 0.0)
    } else {
        z
    }
}

/// `Θ2±(θ1)`: roots in θ2 of `γ(θ1, θ2) = 0`. The square root of the
/// discriminant is `√detΣ·√(θ1−θ1⁻)·√(θ1⁺−θ1)`, so its cut lies on
/// `(−∞, θ1⁻] ∪ [θ1⁺, ∞)`. On the left cut `Θ2⁺` has positive imaginary part.
pub fn theta2_branch(p: &ModelParams, k: &KernelGeometry, theta1: C64, sign: Sign) -> C64 {
    let t = positive_zero(theta1);
    let root = p.det_sigma().sqrt() * (t - k.theta1_minus).sqrt() * (k.theta1_plus - t).sqrt();
    (-(p.sigma12 * t + p.mu2) + sign.factor() * root) / p.sigma22
}

/// `Θ1±(θ2)`, the mirror of [`theta2_branch`].
pub fn theta1_branch(p: &ModelParams, k: &KernelGeometry, theta2: C64, sign: Sign) -> C64 {
    let t = positive_zero(theta2);
    let root = p.det_sigma().sqrt() * (t - k.theta2_minus).sqrt() * (k.theta2_plus - t).sqrt();
    (-(p.sigma12 * t + p.mu1) + sign.factor() * root) / p.sigma11
}

/// Gradient of γ at θ.
pub fn gamma_gradient(p: &ModelParams, t1: f64, t2: f64) -> (f64, f64) {
    (
        p.sigma11 * t1 + p.sigma12 * t2 + p.mu1,
        p.sigma12 * t1 + p.sigma22 * t2 + p.mu2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn polynomial_values() {
        let p = ModelParams::canonical();
        assert_eq!(gamma(&p, c(0.0), c(0.0)), c(0.0));
        assert_abs_diff_eq!(gamma(&p, c(0.0), c(-2.0)).norm(), 0.0);
        assert_abs_diff_eq!(gamma(&p, c(1.0), c(1.0)).re, 3.0);
        let q = ModelParams { r21: 0.5, r12: -0.25, ..p };
        assert_abs_diff_eq!(gamma1(&q, c(1.0), c(2.0)).re, 2.0);
        assert_abs_diff_eq!(gamma2(&q, c(4.0), c(1.0)).re, 0.0);
        let (a, b) = (C64::new(0.3, -1.0), C64::new(2.0, 0.5));
        assert_eq!(gamma1(&p, a, b), a);
        assert_eq!(gamma2(&p, a, b), b);
    }

    #[test]
    fn canonical_geometry() {
        let p = ModelParams::canonical();
        let k = branch_points(&p).unwrap();
        let s2 = std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(k.theta1_minus, -1.0 - s2, epsilon = 1e-14);
        assert_abs_diff_eq!(k.theta1_plus, -1.0 + s2, epsilon = 1e-14);
        assert_abs_diff_eq!(k.theta2_minus, -1.0 - s2, epsilon = 1e-14);
        assert_abs_diff_eq!(k.theta2_plus, -1.0 + s2, epsilon = 1e-14);
        assert_abs_diff_eq!(k.beta, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(k.theta_star, (0.0, -2.0));
        assert_eq!(k.theta_star_star, (-2.0, 0.0));
    }

    #[test]
    fn beta_tends_to_zero_at_perfect_negative_correlation() {
        let p = ModelParams { sigma12: -0.999_999, ..ModelParams::canonical() };
        let k = branch_points(&p).unwrap();
        assert!(k.beta > 0.0 && k.beta < 2e-3);
    }

    #[test]
    fn branches() {
        let p = ModelParams::canonical();
        let k = branch_points(&p).unwrap();
        assert_abs_diff_eq!((theta2_branch(&p, &k, c(0.0), Sign::Plus) - c(0.0)).norm(), 0.0);
        assert_abs_diff_eq!(
            (theta2_branch(&p, &k, c(0.0), Sign::Minus) - c(-2.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        let v = theta2_branch(&p, &k, c(k.theta1_minus), Sign::Minus);
        assert_abs_diff_eq!((v - c(-1.0)).norm(), 0.0, epsilon = 1e-7);
        let up = theta2_branch(&p, &k, c(k.theta1_minus - 1.0), Sign::Plus);
        let dn = theta2_branch(&p, &k, c(k.theta1_minus - 1.0), Sign::Minus);
        assert!(up.im > 0.0);
        assert_abs_diff_eq!((up - dn.conj()).norm(), 0.0, epsilon = 1e-15);
        let t = theta1_branch(&p, &k, c(-1.0), Sign::Minus);
        assert_abs_diff_eq!(t.re, k.theta1_minus, epsilon = 1e-14);
        assert_abs_diff_eq!(theta1_branch(&p, &k, c(0.0), Sign::Minus).re, -2.0, epsilon = 1e-14);
    }

    #[test]
    fn lower_branch_inverts_on_the_cut() {
        let p = ModelParams::new(1.3, 0.4, 0.8, 0.7, 1.1, 0.3, -0.2, 1.0, 1.0).unwrap();
        let k = branch_points(&p).unwrap();
        for i in 1..20 {
            let t1 = k.theta1_minus - 0.37 * i as f64;
            let z = theta2_branch(&p, &k, c(t1), Sign::Minus);
            let back = theta1_branch(&p, &k, z, Sign::Minus);
            assert_abs_diff_eq!((back - c(t1)).norm(), 0.0, epsilon = 1e-10 * (1.0 + t1.abs()));
        }
    }

    #[test]
    fn intersections_lie_on_both_curves() {
        let p = ModelParams::new(1.3, 0.4, 0.8, 0.7, 1.1, 0.3, -0.2, 1.0, 1.0).unwrap();
        let k = branch_points(&p).unwrap();
        let (a, b) = (c(k.theta_star.0), c(k.theta_star.1));
        assert!(gamma(&p, a, b).norm() < 1e-12 && gamma1(&p, a, b).norm() < 1e-12);
        let (a, b) = (c(k.theta_star_star.0), c(k.theta_star_star.1));
        assert!(gamma(&p, a, b).norm() < 1e-12 && gamma2(&p, a, b).norm() < 1e-12);
    }

    #[test]
    fn unit_reflection_on_first_face() {
        // With μ = (1,1) the line θ1 = −θ2 is tangent at the origin.
        let p = ModelParams { r21: 1.0, ..ModelParams::canonical() };
        let ip = intersection_points(&p);
        assert!(ip.star_degenerate);
        assert_eq!(ip.theta_star, (0.0, 0.0));
        let p = ModelParams { r21: 1.0, mu1: 2.0, ..ModelParams::canonical() };
        let ip = intersection_points(&p);
        assert_abs_diff_eq!(ip.theta_star.1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ip.theta_star.0, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn drift_is_outer_normal_at_origin() {
        let p = ModelParams::new(1.3, 0.4, 0.8, 0.7, 1.1, 0.3, -0.2, 1.0, 1.0).unwrap();
        assert_eq!(gamma_gradient(&p, 0.0, 0.0), (p.mu1, p.mu2));
    }
}
