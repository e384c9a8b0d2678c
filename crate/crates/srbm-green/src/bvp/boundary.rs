use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::curve::{vertex, ContourGrid};
use crate::error::{Error, Result};
use crate::kernel::{gamma1, gamma2, theta1_branch, KernelGeometry, Sign};
use crate::model::ModelParams;
use crate::quadrature::winding;

const I: C64 = C64::new(0.0, 1.0);

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Coefficient of the boundary condition at a point of the hyperbola.
#[allow(non_snake_case)]
pub fn G_fn(p: &ModelParams, k: &KernelGeometry, theta2: C64) -> Result<C64> {
    let t1 = theta1_branch(p, k, theta2, Sign::Minus);
    let (here, there) = (theta2, theta2.conj());
    let den_a = gamma2(p, t1, here);
    let den_b = gamma1(p, t1, there);
    if den_a == real(0.0) || den_b == real(0.0) {
        return Err(Error::Pole { what: "G", location: theta2 });
    }
    Ok(gamma1(p, t1, here) / den_a * gamma2(p, t1, there) / den_b)
}

/// Inhomogeneous term of the boundary condition. It vanishes at the vertex,
/// where the two exponentials coincide.
pub fn g_fn(p: &ModelParams, k: &KernelGeometry, theta2: C64) -> Result<C64> {
    if theta2.im == 0.0 {
        return Ok(real(0.0));
    }
    let t1 = theta1_branch(p, k, theta2, Sign::Minus);
    let (here, there) = (theta2, theta2.conj());
    let (a, b) = (gamma2(p, t1, here), gamma2(p, t1, there));
    let c = gamma1(p, t1, there);
    if a == real(0.0) || b == real(0.0) || c == real(0.0) {
        return Err(Error::Pole { what: "g", location: theta2 });
    }
    let e = |t2: C64| (t1 * p.x1 + t2 * p.x2).exp();
    Ok(b / c * (e(here) / a - e(there) / b))
}

/// Index from the sign of `γ1γ2` at `(θ1⁻, vertex)`: 1 if positive, else 0.
pub fn index_chi(p: &ModelParams, k: &KernelGeometry) -> i32 {
    let v = real(vertex(p, k));
    let t1 = real(k.theta1_minus);
    if (gamma1(p, t1, v) * gamma2(p, t1, v)).re > 0.0 {
        1
    } else {
        0
    }
}

/// Boundary data sampled on the contour grid.
#[allow(non_snake_case)]
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub g_vals: Vec<C64>,
    pub G_vals: Vec<C64>,
    /// Continuous logarithm of `G`, equal to `i·d` at the vertex.
    pub log_g_vals: Vec<C64>,
    /// Limit of the logarithm at infinity.
    pub log_g_infinity: C64,
    /// `arg G` at the vertex, in `(−π, π]`.
    pub d: f64,
    /// Variation of `arg G` from the vertex to infinity.
    pub delta: f64,
    /// Index from the sign rule.
    pub chi_sign: i32,
    /// Index from the winding of the samples; `None` if the phase is not
    /// resolved by the grid.
    pub chi_wind: Option<i32>,
}

/// Arguments of the reflection forms at the vertex end, as one-sided limits
/// from the lower half. The imaginary part of `γ2` is that of `θ2`, negative;
/// that of `γ1` has the sign of `−r21`.
fn vertex_args(p: &ModelParams, k: &KernelGeometry) -> (f64, f64) {
    let v = vertex(p, k);
    let g1 = k.theta1_minus + p.r21 * v;
    let g2 = p.r12 * k.theta1_minus + v;
    let a1 = if p.r21 == 0.0 {
        PI
    } else if g1 > 0.0 {
        0.0
    } else if g1 < 0.0 {
        -PI * p.r21.signum()
    } else {
        -FRAC_PI_2 * p.r21.signum()
    };
    let a2 = if g2 > 0.0 {
        0.0
    } else if g2 < 0.0 {
        -PI
    } else {
        -FRAC_PI_2
    };
    (a1, a2)
}

fn arg_gamma1(p: &ModelParams, g1: C64) -> f64 {
    // With r21 = 0 the form is real and negative on the whole curve.
    if p.r21 == 0.0 {
        PI
    } else {
        g1.arg()
    }
}

fn principal(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Samples `G`, `g` and a continuous `log G` on the grid.
pub fn boundary_data(p: &ModelParams, k: &KernelGeometry, grid: &ContourGrid) -> Result<BoundaryData> {
    let (a1, a2) = vertex_args(p, k);
    let d = {
        let d = principal(2.0 * (a1 - a2)) + 0.0;
        // Keep d in (−π, π].
        if d <= -PI {
            d + 2.0 * PI
        } else {
            d
        }
    };
    let n = grid.points.len();
    let mut g_vals = Vec::with_capacity(n);
    let mut big_g = Vec::with_capacity(n);
    let mut log_g = Vec::with_capacity(n);
    for pt in &grid.points {
        let s = real(pt.t1);
        let t = pt.z;
        let g1 = gamma1(p, s, t);
        let g2 = gamma2(p, s, t);
        if g1 == real(0.0) || g2 == real(0.0) {
            return Err(Error::Pole { what: "G", location: t });
        }
        let ratio = g1 / g2;
        big_g.push(ratio / ratio.conj());
        let e = (s * p.x1 + t * p.x2).exp();
        g_vals.push(2.0 * I * (e / g2).im * (g2 / g1).conj());
        let phase = (arg_gamma1(p, g1) - a1) - (g2.arg() - a2);
        log_g.push(I * (d + 2.0 * phase));
    }
    // Directions of γ1 and γ2 as θ1 → −∞ along the curve.
    let det = p.det_sigma();
    let dir = C64::new(p.sigma12, -det.sqrt()) / p.sigma22;
    let g1_inf = real(-1.0) + p.r21 * dir;
    let g2_inf = real(-p.r12) + dir;
    let phase_inf = (arg_gamma1(p, g1_inf) - a1) - (g2_inf.arg() - a2);
    let log_g_infinity = I * (d + 2.0 * phase_inf);
    let delta = log_g_infinity.im - d;

    let mut samples = Vec::with_capacity(n + 2);
    samples.push(C64::from_polar(1.0, d));
    samples.extend_from_slice(&big_g);
    samples.push(log_g_infinity.exp());
    let chi_wind = winding(&samples).ok().map(|w| -((d + w) / (2.0 * PI)).floor() as i32);

    Ok(BoundaryData {
        g_vals,
        G_vals: big_g,
        log_g_vals: log_g,
        log_g_infinity,
        d,
        delta,
        chi_sign: index_chi(p, k),
        chi_wind,
    })
}

/// Index recomputed from the sampled phase of `G`: `−⌊(d + Δ)/2π⌋`, the sign
/// being fixed by the orientation vertex → infinity.
pub fn winding_check(bd: &BoundaryData) -> Result<i32> {
    let mut samples = Vec::with_capacity(bd.G_vals.len() + 2);
    samples.push(C64::from_polar(1.0, bd.d));
    samples.extend_from_slice(&bd.G_vals);
    samples.push(bd.log_g_infinity.exp());
    let w = winding(&samples)?;
    Ok(-((bd.d + w) / (2.0 * PI)).floor() as i32)
}
