//! Conformal gluing function built from the generalised Chebyshev function.
//!
//! With `x = −(θ2 − c)/h` and `ψ = arccos x`, the map is `w = cos(aψ)` where
//! `a = π/β`. Near each end of the segment `[θ2⁻, θ2⁺]` the angle is computed
//! from a half-angle arcsine, which is free of cancellation there.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kernel::KernelGeometry;

/// `T_a(x) = cos(a·arccos x)` with the principal arccosine.
pub fn chebyshev(a: f64, x: C64) -> C64 {
    (a * x.acos()).cos()
}

/// `½[(x+√(x²−1))^a + (x−√(x²−1))^a]`, the algebraic form of [`chebyshev`].
pub fn chebyshev_algebraic(a: f64, x: C64) -> C64 {
    let r = (x * x - 1.0).sqrt();
    0.5 * ((x + r).powf(a) + (x - r).powf(a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluingMap {
    /// `π/β`.
    pub exponent: f64,
    /// Midpoint of `[θ2⁻, θ2⁺]`.
    pub center: f64,
    /// Half-length of `[θ2⁻, θ2⁺]`.
    pub halfwidth: f64,
    theta2_plus: f64,
    theta2_minus: f64,
}

/// Angle representation chosen for numerical stability.
enum Angle {
    /// `ψ = π − ζ`, used near θ2⁺.
    FromRight(C64),
    /// `ψ = φ`, used near θ2⁻.
    FromLeft(C64),
}

impl GluingMap {
    pub fn new(k: &KernelGeometry) -> Self {
        Self {
            exponent: PI / k.beta,
            center: 0.5 * (k.theta2_plus + k.theta2_minus),
            halfwidth: 0.5 * (k.theta2_plus - k.theta2_minus),
            theta2_plus: k.theta2_plus,
            theta2_minus: k.theta2_minus,
        }
    }

    fn angle(&self, theta2: C64) -> Result<Angle> {
        if theta2.im == 0.0 && theta2.re >= self.theta2_plus {
            return Err(Error::Domain(format!("θ2 = {} lies on the cut [θ2⁺, ∞)", theta2.re)));
        }
        let to_plus = (theta2 - self.theta2_plus).norm();
        let to_minus = (theta2 - self.theta2_minus).norm();
        let half = |q: C64| 2.0 * q.sqrt().asin();
        Ok(if to_plus < to_minus {
            Angle::FromRight(half((self.theta2_plus - theta2) / (2.0 * self.halfwidth)))
        } else {
            let t = theta2 - self.theta2_minus;
            // Keep real arguments left of θ2⁻ on one lip; cos is even there anyway.
            let t = if t.im == 0.0 { C64::new(t.re, 0.0) } else { t };
            Angle::FromLeft(half(t / (2.0 * self.halfwidth)))
        })
    }

    /// The gluing function on `ℂ ∖ [θ2⁺, ∞)`.
    pub fn w(&self, theta2: C64) -> Result<C64> {
        let a = self.exponent;
        Ok(match self.angle(theta2)? {
            Angle::FromRight(z) => (a * (PI - z)).cos(),
            Angle::FromLeft(phi) => (a * phi).cos(),
        })
    }

    /// Derivative `dw/dθ2`.
    pub fn w_prime(&self, theta2: C64) -> Result<C64> {
        let a = self.exponent;
        let h = self.halfwidth;
        match self.angle(theta2)? {
            Angle::FromRight(z) => {
                if z.norm() == 0.0 {
                    return Err(Error::Pole { what: "w′", location: theta2 });
                }
                Ok(-a * (a * (PI - z)).sin() / (h * z.sin()))
            }
            Angle::FromLeft(phi) => {
                if phi.norm() < 1e-5 {
                    let ratio = a * (1.0 - (a * a - 1.0) * phi * phi / 6.0);
                    Ok(-a * ratio / h)
                } else {
                    Ok(-a * (a * phi).sin() / (h * phi.sin()))
                }
            }
        }
    }

    /// `(w + 1)/w`, which sends the vertex to 0 and infinity to 1.
    pub fn big_w(&self, theta2: C64) -> Result<C64> {
        let w = self.w(theta2)?;
        if w.norm() < 1e-14 {
            return Err(Error::Pole { what: "W", location: theta2 });
        }
        Ok((w + 1.0) / w)
    }

    /// The point of the real axis left of the vertex where `w = 0`; this is
    /// the pole of `W`.
    pub fn zero_of_w(&self) -> f64 {
        self.center - self.halfwidth * (0.5 * PI / self.exponent).cos()
    }

    /// The vertex of the hyperbola, where `w = −1`.
    pub fn vertex(&self) -> f64 {
        self.center - self.halfwidth * (PI / self.exponent).cos()
    }
}

pub fn w(k: &KernelGeometry, theta2: C64) -> Result<C64> {
    GluingMap::new(k).w(theta2)
}

pub fn w_prime(k: &KernelGeometry, theta2: C64) -> Result<C64> {
    GluingMap::new(k).w_prime(theta2)
}

#[allow(non_snake_case)]
pub fn W(k: &KernelGeometry, theta2: C64) -> Result<C64> {
    GluingMap::new(k).big_w(theta2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::branch_points;
    use crate::model::ModelParams;
    use approx::assert_abs_diff_eq;

    fn canonical() -> GluingMap {
        GluingMap::new(&branch_points(&ModelParams::canonical()).unwrap())
    }

    #[test]
    fn chebyshev_identities() {
        for &x in &[C64::new(0.3, 0.2), C64::new(-0.7, -1.1), C64::new(2.5, 0.4)] {
            assert_abs_diff_eq!((chebyshev(2.0, x) - (2.0 * x * x - 1.0)).norm(), 0.0, epsilon = 1e-13);
            let alg = chebyshev_algebraic(2.0, x);
            assert_abs_diff_eq!((chebyshev(2.0, x) - alg).norm(), 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!((chebyshev(1.7, C64::new(1.0, 0.0)) - 1.0).norm(), 0.0);
        assert_abs_diff_eq!(chebyshev(3.0, C64::new(0.5, 0.0)).re, -1.0, epsilon = 1e-14);
        let x = C64::new(0.2, 0.6);
        assert_abs_diff_eq!((chebyshev(2.6, x) - chebyshev_algebraic(2.6, x)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn canonical_closed_form() {
        // Here a = 2 and h = √2, so w = (θ2 + 1)² − 1.
        let g = canonical();
        for &t in &[C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(-2.3, 1.4), C64::new(-5.0, -3.0)] {
            let exact = (t + 1.0) * (t + 1.0) - 1.0;
            assert_abs_diff_eq!((g.w(t).unwrap() - exact).norm(), 0.0, epsilon = 1e-12 * (1.0 + exact.norm()));
            let d = 2.0 * (t + 1.0);
            assert_abs_diff_eq!((g.w_prime(t).unwrap() - d).norm(), 0.0, epsilon = 1e-11 * (1.0 + d.norm()));
        }
        assert_abs_diff_eq!(g.w(C64::new(0.0, 0.0)).unwrap().norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.w_prime(C64::new(-1.0, 0.0)).unwrap().norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.zero_of_w(), -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.vertex(), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn big_w_values() {
        let g = canonical();
        assert_abs_diff_eq!(g.big_w(C64::new(-1.0, 0.0)).unwrap().norm(), 0.0, epsilon = 1e-14);
        let far = g.big_w(C64::new(-1e6, 0.0)).unwrap();
        assert_abs_diff_eq!((far - 1.0).norm(), 0.0, epsilon = 1e-11);
        assert!(matches!(g.big_w(C64::new(-2.0, 0.0)), Err(Error::Pole { .. })));
        assert_abs_diff_eq!(g.big_w(C64::new(-0.5, 0.0)).unwrap().re, -1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn cut_is_rejected() {
        let g = canonical();
        assert!(g.w(C64::new(1.0, 0.0)).is_err());
        assert!(g.w(C64::new(1.0, 1e-9)).is_ok());
    }

    #[test]
    fn real_left_of_upper_branch_point() {
        let p = ModelParams::new(1.3, 0.4, 0.8, 0.7, 1.1, 0.3, -0.2, 1.0, 1.0).unwrap();
        let g = GluingMap::new(&branch_points(&p).unwrap());
        for i in 0..40 {
            let t = C64::new(g.theta2_plus - 0.01 - 0.3 * i as f64, 0.0);
            assert!(g.w(t).unwrap().im.abs() < 1e-12 * (1.0 + g.w(t).unwrap().norm()));
        }
    }

    #[test]
    fn derivative_through_the_left_branch_point() {
        let p = ModelParams::new(1.3, 0.4, 0.8, 0.7, 1.1, 0.3, -0.2, 1.0, 1.0).unwrap();
        let g = GluingMap::new(&branch_points(&p).unwrap());
        let limit = -g.exponent * g.exponent / g.halfwidth;
        let at = g.w_prime(C64::new(g.theta2_minus, 0.0)).unwrap();
        assert_abs_diff_eq!((at - limit).norm(), 0.0, epsilon = 1e-12);
        let near = g.w_prime(C64::new(g.theta2_minus + 1e-7, 1e-7)).unwrap();
        assert_abs_diff_eq!((near - limit).norm(), 0.0, epsilon = 1e-5);
    }
}
