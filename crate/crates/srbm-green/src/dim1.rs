//! Closed forms for reflected Brownian motion on the half-line, used as exact
//! references for the simulation and for the transform conventions.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numeric::exprel;

/// Variance rate, drift and starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dim1Params {
    pub sigma2: f64,
    pub mu: f64,
    pub x0: f64,
}

impl Dim1Params {
    pub fn new(sigma2: f64, mu: f64, x0: f64) -> Result<Self> {
        let q = Self { sigma2, mu, x0 };
        q.check()?;
        Ok(q)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::Parameter(format!("variance rate {} must be positive", self.sigma2)));
        }
        if !self.mu.is_finite() {
            return Err(Error::Parameter("non-finite drift".into()));
        }
        if !(self.x0 >= 0.0 && self.x0.is_finite()) {
            return Err(Error::Parameter(format!("start {} must be non-negative", self.x0)));
        }
        Ok(())
    }

    /// `2μ/σ²`.
    pub fn rate(&self) -> f64 {
        2.0 * self.mu / self.sigma2
    }

    fn transient(&self) -> Result<()> {
        self.check()?;
        if self.mu <= 0.0 {
            return Err(Error::Domain(format!("drift {} is not positive; the motion is recurrent", self.mu)));
        }
        Ok(())
    }
}

/// Green's function density `g(x0, x)`.
pub fn green_1d(q: &Dim1Params, x: f64) -> Result<f64> {
    q.transient()?;
    if x < 0.0 {
        return Err(Error::Domain(format!("x = {x} is negative")));
    }
    Ok(if x < q.x0 { (q.rate() * (x - q.x0)).exp() / q.mu } else { 1.0 / q.mu })
}

/// `∫₀^∞ e^{θx} g(x0, x) dx`, split at `x0` so that `θ = −2μ/σ²` needs no
/// special treatment.
pub fn psi_1d(q: &Dim1Params, theta: C64) -> Result<C64> {
    q.transient()?;
    if theta == C64::new(0.0, 0.0) {
        return Err(Error::Pole { what: "ψ", location: theta });
    }
    if theta.re >= 0.0 {
        return Err(Error::Domain(format!("Re θ = {} must be negative", theta.re)));
    }
    let k = q.rate();
    let near = (-k * q.x0).exp() * q.x0 * exprel((k + theta) * q.x0);
    let far = -(theta * q.x0).exp() / theta;
    Ok((near + far) / q.mu)
}

/// The rational form `−(e^{θx0} + θ(σ²/2μ)e^{−(2μ/σ²)x0})/(μθ + ½σ²θ²)`,
/// which is 0/0 at `θ = −2μ/σ²`.
pub fn psi_1d_rational(q: &Dim1Params, theta: C64) -> Result<C64> {
    q.transient()?;
    let den = q.mu * theta + 0.5 * q.sigma2 * theta * theta;
    let num = (theta * q.x0).exp() + theta * (q.sigma2 / (2.0 * q.mu)) * (-q.rate() * q.x0).exp();
    if den.norm() < 1e-14 * (1.0 + theta.norm_sqr()) {
        return if theta.norm() < 1e-14 {
            Err(Error::Pole { what: "ψ", location: theta })
        } else {
            Err(Error::Removable { theta: (theta, C64::new(0.0, 0.0)) })
        };
    }
    Ok(-num / den)
}

/// Centred finite-difference residual of `(σ²/2)g″ − μg′` at `x`, where the
/// stencil does not straddle the source at `x0`.
pub fn pde_residual_1d(q: &Dim1Params, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || x - h < 0.0 || (x - h < q.x0 && x + h > q.x0) || x == q.x0 {
        return Err(Error::Domain(format!("stencil at {x} with step {h} crosses the source or the boundary")));
    }
    let (a, b, c) = (green_1d(q, x - h)?, green_1d(q, x)?, green_1d(q, x + h)?);
    Ok(0.5 * q.sigma2 * (c - 2.0 * b + a) / (h * h) - q.mu * (c - a) / (2.0 * h))
}

/// One-sided residual of the boundary condition `σ² g′(0) − 2μ g(0) = 0`.
pub fn boundary_residual_1d(q: &Dim1Params, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain("step must be positive".into()));
    }
    let (g0, g1) = (green_1d(q, 0.0)?, green_1d(q, h)?);
    Ok(q.sigma2 * (g1 - g0) / h - 2.0 * q.mu * g0)
}

/// `E L(∞) = (σ²/2μ)e^{−(2μ/σ²)x0}`.
pub fn expected_local_time_1d(q: &Dim1Params) -> Result<f64> {
    q.transient()?;
    Ok(q.sigma2 / (2.0 * q.mu) * (-q.rate() * q.x0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit(x0: f64) -> Dim1Params {
        Dim1Params::new(1.0, 1.0, x0).unwrap()
    }

    #[test]
    fn green_values() {
        let q = unit(1.0);
        assert_abs_diff_eq!(green_1d(&q, 0.0).unwrap(), (-2.0f64).exp(), epsilon = 1e-16);
        assert_eq!(green_1d(&q, 3.0).unwrap(), 1.0);
        assert_eq!(green_1d(&q, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(green_1d(&q, 1.0 - 1e-12).unwrap(), 1.0, epsilon = 1e-11);
        assert!(green_1d(&Dim1Params { mu: -1.0, ..q }, 0.5).is_err());
    }

    #[test]
    fn transform_values() {
        assert_abs_diff_eq!((psi_1d(&unit(0.0), C64::new(-1.0, 0.0)).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-15);
        let q = unit(1.0);
        let t = C64::new(-0.7, 0.3);
        assert_abs_diff_eq!((psi_1d(&q, t).unwrap() - psi_1d_rational(&q, t).unwrap()).norm(), 0.0, epsilon = 1e-13);
        let at = psi_1d(&q, C64::new(-2.0, 0.0)).unwrap();
        let near = psi_1d_rational(&q, C64::new(-2.0 + 1e-6, 0.0)).unwrap();
        assert_abs_diff_eq!((at - near).norm(), 0.0, epsilon = 1e-5);
        assert!(matches!(psi_1d_rational(&q, C64::new(-2.0, 0.0)), Err(Error::Removable { .. })));
        assert!(matches!(psi_1d(&q, C64::new(0.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn differential_equation() {
        let q = unit(1.0);
        assert_eq!(pde_residual_1d(&q, 2.0, 1e-3).unwrap(), 0.0);
        let r1 = pde_residual_1d(&q, 0.5, 1e-2).unwrap().abs();
        let r2 = pde_residual_1d(&q, 0.5, 5e-3).unwrap().abs();
        assert!(r1 < 1e-3 && (r1 / r2 - 4.0).abs() < 0.1);
        let b1 = boundary_residual_1d(&q, 1e-3).unwrap().abs();
        let b2 = boundary_residual_1d(&q, 5e-4).unwrap().abs();
        assert!(b1 < 1e-3 && (b1 / b2 - 2.0).abs() < 0.05);
        assert!(pde_residual_1d(&q, 1.0, 1e-3).is_err());
    }

    #[test]
    fn local_time_mean() {
        assert_abs_diff_eq!(expected_local_time_1d(&unit(1.0)).unwrap(), 0.5 * (-2.0f64).exp(), epsilon = 1e-16);
    }
}
