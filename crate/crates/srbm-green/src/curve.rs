//! The hyperbola branch bounding the continuation domain, and the quadrature
//! grid on its lower half.
//!
//! The lower half is generated by `θ1 = θ1⁻ − sinh²(v)`, `v ≥ 0`, with
//! `θ2 = Θ2⁻(θ1)`. The square in the stretch cancels the square-root
//! behaviour of `Θ2⁻` at the vertex, so integrands are smooth in `v`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kernel::KernelGeometry;
use crate::model::ModelParams;
use crate::quadrature::PanelRule;

/// A point of the lower half of the hyperbola.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Generating value of θ1, at most θ1⁻.
    pub t1: f64,
    /// `Θ2⁻(t1)`.
    pub z: C64,
    /// `dΘ2⁻/dθ1` at `t1`.
    pub dz: C64,
}

/// Gauss–Legendre grid on the lower half of the hyperbola.
#[derive(Debug, Clone)]
pub struct ContourGrid {
    /// Ordered from the vertex outwards (decreasing `t1`).
    pub points: Vec<CurvePoint>,
    /// Weights for integrals in `θ1`, i.e. `Σ weights·f ≈ ∫ f dθ1`.
    pub weights: Vec<f64>,
    /// Most negative `θ1` covered.
    pub truncation_t1: f64,
    pub node_count: usize,
    /// Stretch parameter of each node and its weight.
    pub v: Vec<f64>,
    pub v_weights: Vec<f64>,
    /// `dθ2/dv` at each node.
    pub dz_dv: Vec<C64>,
    /// Panel layout in `v`.
    pub rule: PanelRule,
}

/// `Θ2(θ1⁻)`, the real vertex of the hyperbola.
pub fn vertex(p: &ModelParams, k: &KernelGeometry) -> f64 {
    -(p.sigma12 * k.theta1_minus + p.mu2) / p.sigma22
}

/// Left side minus right side of the conic equation containing the
/// hyperbola, at `x + iy = θ2`.
pub fn hyperbola_residual(p: &ModelParams, theta2: C64) -> f64 {
    let (x, y) = (theta2.re, theta2.im);
    let (s11, s12, s22) = (p.sigma11, p.sigma12, p.sigma22);
    let lhs = s22 * (s12 * s12 - s11 * s22) * x * x + s12 * s12 * s22 * y * y
        - 2.0 * s22 * (s11 * p.mu2 - s12 * p.mu1) * x;
    lhs - p.mu2 * (s11 * p.mu2 - 2.0 * s12 * p.mu1)
}

/// Abscissa of the hyperbola branch at height `y`.
pub fn boundary_abscissa(p: &ModelParams, y: f64) -> f64 {
    let a = p.sigma12 * p.sigma12 - p.sigma11 * p.sigma22;
    let b = p.mu2 * p.sigma12 - p.mu1 * p.sigma22;
    let c = p.mu2 * p.mu2 + (p.sigma22 * y).powi(2);
    // Smaller root of a s² + 2 b s + c = 0 (a < 0); it lies left of θ1⁻.
    let s = (-b + (b * b - a * c).sqrt()) / a;
    -(p.sigma12 * s + p.mu2) / p.sigma22
}

/// Whether θ2 lies in the open domain bounded on the right by the hyperbola.
pub fn in_domain(p: &ModelParams, _k: &KernelGeometry, theta2: C64) -> bool {
    theta2.re < boundary_abscissa(p, theta2.im)
}

/// Point of the lower half at stretch parameter `v`, with `dθ2/dv`.
pub fn stretch_point(p: &ModelParams, k: &KernelGeometry, v: f64) -> (f64, C64, C64) {
    let (sh, ch) = (v.sinh(), v.cosh());
    let s = k.theta1_minus - sh * sh;
    let neg_a = p.det_sigma();
    let b = p.mu2 * p.sigma12 - p.mu1 * p.sigma22;
    let root_right = (k.theta1_plus - s).sqrt();
    let re = -(p.sigma12 * s + p.mu2) / p.sigma22;
    // √(−d(s)) = √(−A)·sinh(v)·√(θ1⁺ − s).
    let im = -neg_a.sqrt() * sh * root_right / p.sigma22;
    let dd = 2.0 * neg_a * s - 2.0 * b;
    let dre = 2.0 * p.sigma12 * sh * ch / p.sigma22;
    let dim = dd * ch / (p.sigma22 * neg_a.sqrt() * root_right);
    (s, C64::new(re, im), C64::new(dre, dim))
}

/// Exponential decay rate, in `sinh²v`, of `e^{θ·x}` along the lower half.
pub fn decay_rate(p: &ModelParams) -> f64 {
    p.x1 - p.sigma12 * p.x2 / p.sigma22
}

const MAX_PANEL_WIDTH: f64 = 0.5;

fn panel_order(node_count: usize) -> Option<usize> {
    [16, 12, 10, 8].into_iter().find(|o| node_count >= *o && node_count % o == 0)
}

/// Builds the grid. The truncation point is chosen so that the factor
/// `e^{θ·x}` of the boundary data, and the constant-tail error of bounded
/// densities, fall below `tol`.
pub fn contour_grid(p: &ModelParams, k: &KernelGeometry, node_count: usize, tol: f64) -> Result<ContourGrid> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Parameter(format!("tolerance {tol} outside (0, 1)")));
    }
    let rho = decay_rate(p);
    if rho < 0.0 {
        return Err(Error::Domain(format!(
            "boundary data grows along the contour for this starting point (rate {rho})"
        )));
    }
    let log_tol = (1.0 / tol).ln();
    let a = std::f64::consts::PI / k.beta;
    let scale = (k.theta1_plus - k.theta1_minus).max(1e-3);
    // Tail of bounded densities: needs |t|^{1+a} large compared with 1/tol.
    let algebraic = ((log_tol + 100f64.ln()) / (1.0 + a)).exp() / scale;
    let mut v_max = algebraic.sqrt().asinh();
    if rho > 0.0 {
        v_max = v_max.max(((log_tol + 20.0) / rho).sqrt().asinh() + 2.0);
    } else {
        v_max *= 2.0;
    }
    // Keep w = O(|t|^a) representable.
    let t_cap = (600.0 / a).exp() / scale;
    v_max = v_max.min(t_cap.sqrt().asinh());

    let achieved = |panels: usize| {
        let v_eff = v_max.min(panels as f64 * MAX_PANEL_WIDTH);
        let s2 = v_eff.sinh().powi(2);
        if rho > 0.0 {
            (-rho * s2).exp()
        } else {
            1.0 / (1.0 + s2)
        }
    };
    let order = match panel_order(node_count) {
        Some(o) => o,
        None => {
            let panels = (node_count / 8).max(1);
            return Err(Error::Truncation { achieved: achieved(panels).max(tol * 10.0), requested: tol });
        }
    };
    let panels = node_count / order;
    if v_max / panels as f64 > MAX_PANEL_WIDTH {
        return Err(Error::Truncation { achieved: achieved(panels), requested: tol });
    }

    let rule = PanelRule::new(order, panels, v_max);
    let (v, v_weights) = rule.nodes();
    let mut points = Vec::with_capacity(node_count);
    let mut weights = Vec::with_capacity(node_count);
    let mut dz_dv = Vec::with_capacity(node_count);
    for (&vi, &wi) in v.iter().zip(&v_weights) {
        let (s, z, dzv) = stretch_point(p, k, vi);
        let ds_dv = -2.0 * vi.sinh() * vi.cosh();
        points.push(CurvePoint { t1: s, z, dz: dzv / ds_dv });
        weights.push(wi * ds_dv.abs());
        dz_dv.push(dzv);
    }
    let truncation_t1 = k.theta1_minus - v_max.sinh().powi(2);
    Ok(ContourGrid { points, weights, truncation_t1, node_count, v, v_weights, dz_dv, rule })
}
