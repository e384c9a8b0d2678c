//! Cauchy-type integrals over the image of the lower half of the hyperbola.
//!
//! The contour is carried by a stretch parameter `v ∈ [0, V]`, split into
//! Gauss–Legendre panels. In the glued coordinate `u = w(t(v))` the contour
//! is the real half-line `[−1, −∞)`, traversed from `u = −1` (the vertex)
//! towards `−∞`. All integrals below are
//! `(1/2πi) ∫ f(v) K(u(v), ω) u′(v) dv` with either the plain kernel
//! `1/(u − ω)` or the regularised one `1/(u − ω) − 1/u`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numeric::{barycentric_eval, barycentric_weights, differentiation_matrix, gauss_legendre};

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

/// Composite Gauss–Legendre rule on `[0, V]` with equal panels.
#[derive(Debug, Clone)]
pub struct PanelRule {
    pub order: usize,
    pub edges: Vec<f64>,
    reference: Vec<f64>,
    reference_weights: Vec<f64>,
    lambda: Vec<f64>,
    diff: Vec<f64>,
}

impl PanelRule {
    pub fn new(order: usize, panels: usize, length: f64) -> Self {
        let (reference, reference_weights) = gauss_legendre(order);
        let lambda = barycentric_weights(&reference);
        let diff = differentiation_matrix(&reference);
        let edges = (0..=panels).map(|i| length * i as f64 / panels as f64).collect();
        Self { order, edges, reference, reference_weights, lambda, diff }
    }

    pub fn panels(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn len(&self) -> usize {
        self.order * self.panels()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes and weights in `v`, ordered by increasing `v`.
    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let mut v = Vec::with_capacity(self.len());
        let mut wv = Vec::with_capacity(self.len());
        for p in self.edges.windows(2) {
            let (mid, half) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
            for (x, w) in self.reference.iter().zip(&self.reference_weights) {
                v.push(mid + half * x);
                wv.push(half * w);
            }
        }
        (v, wv)
    }

    fn panel_half(&self, p: usize) -> f64 {
        0.5 * (self.edges[p + 1] - self.edges[p])
    }

    fn to_reference(&self, p: usize, v: f64) -> f64 {
        (v - 0.5 * (self.edges[p] + self.edges[p + 1])) / self.panel_half(p)
    }

    /// Panel-wise polynomial interpolation of nodal values at `v`.
    pub fn interpolate<T>(&self, values: &[T], p: usize, v: f64) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Div<f64, Output = T>,
    {
        let s = &values[p * self.order..(p + 1) * self.order];
        barycentric_eval(&self.reference, &self.lambda, s, self.to_reference(p, v))
    }

    /// Panel-wise derivative `d/dv` of nodal values.
    pub fn differentiate(&self, values: &[C64]) -> Vec<C64> {
        let n = self.order;
        let mut out = vec![C64::new(0.0, 0.0); values.len()];
        for p in 0..self.panels() {
            let scale = 1.0 / self.panel_half(p);
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    acc += self.diff[i * n + j] * values[p * n + j];
                }
                out[p * n + i] = acc * scale;
            }
        }
        out
    }
}

/// Quadrature data of the contour in the glued coordinate.
#[derive(Debug, Clone)]
pub struct CurveNodes {
    pub rule: PanelRule,
    pub v: Vec<f64>,
    pub wv: Vec<f64>,
    /// `u_j = w(t_j)`, decreasing from just below −1.
    pub u: Vec<f64>,
    /// `du/dv` at the nodes.
    pub du: Vec<f64>,
    /// `u` at the panel edges; `u_edges[0] = −1`.
    pub u_edges: Vec<f64>,
}

impl CurveNodes {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u_end(&self) -> f64 {
        *self.u_edges.last().expect("non-empty contour")
    }

    /// Distance from ω to the contour image and the local node spacing there.
    pub fn proximity(&self, omega: C64) -> (f64, f64) {
        let n = self.len();
        let x = omega.re;
        let j = match self.u.iter().position(|&uj| uj <= x) {
            Some(j) => j,
            None => n - 1,
        };
        let left = if j == 0 { -1.0 } else { self.u[j - 1] };
        let right = if j + 1 < n { self.u[j + 1] } else { self.u_end() };
        let spacing = (left - self.u[j]).abs().max((self.u[j] - right).abs());
        let distance = if x > -1.0 {
            (omega - C64::new(-1.0, 0.0)).norm()
        } else if x < self.u_end() {
            (omega - C64::new(self.u_end(), 0.0)).norm()
        } else {
            omega.im.abs()
        };
        (distance, spacing)
    }

    /// Parameter `v` at which `u(v) = x`, for `x` in `[u_end, −1]`, with its panel.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let panels = self.rule.panels();
        if x >= -1.0 {
            return (0, 0.0);
        }
        if x <= self.u_end() {
            return (panels - 1, *self.rule.edges.last().unwrap());
        }
        let p = (0..panels).find(|&p| self.u_edges[p + 1] <= x).unwrap_or(panels - 1);
        let (mut a, mut b) = (self.rule.edges[p], self.rule.edges[p + 1]);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if self.rule.interpolate(&self.u, p, m) > x {
                a = m;
            } else {
                b = m;
            }
        }
        (p, 0.5 * (a + b))
    }
}

/// Which kernel multiplies the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// `1/(u − ω)`.
    Plain,
    /// `1/(u − ω) − 1/u`; integrable against bounded densities at infinity.
    Regularized,
}

/// How the singularity of the kernel is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Plain quadrature; ω must be well separated from the contour.
    OffCurve,
    /// Singularity subtraction at the projection of ω onto the contour.
    NearCurve,
    /// Principal value at the given node.
    PrincipalValue(usize),
}

/// Samples of a density on the contour nodes.
#[derive(Debug, Clone, Copy)]
pub struct CauchyIntegrand<'a> {
    pub values: &'a [C64],
    pub nodes: &'a CurveNodes,
    /// Limit of the density at infinity, continued as a constant beyond the
    /// truncation point. Only meaningful with the regularised kernel.
    pub tail: C64,
}

impl<'a> CauchyIntegrand<'a> {
    pub fn new(values: &'a [C64], nodes: &'a CurveNodes) -> Self {
        Self { values, nodes, tail: C64::new(0.0, 0.0) }
    }

    pub fn with_tail(self, tail: C64) -> Self {
        Self { tail, ..self }
    }
}

fn kernel_at(kind: Kernel, u: f64, omega: C64) -> C64 {
    match kind {
        Kernel::Plain => 1.0 / (u - omega),
        Kernel::Regularized => 1.0 / (u - omega) - 1.0 / u,
    }
}

/// `∫ K du` over `[−1, u_end]`, continuous in ω off the contour.
fn kernel_integral(kind: Kernel, u_end: f64, omega: C64) -> C64 {
    let base = (u_end - omega).ln() - (-1.0 - omega).ln();
    match kind {
        Kernel::Plain => base,
        Kernel::Regularized => base - (-u_end).ln(),
    }
}

/// Principal value of `∫ K du` over `[−1, u_end]` at a point of the contour.
fn kernel_pv(kind: Kernel, u_end: f64, u0: f64) -> f64 {
    let base = (u_end - u0).abs().ln() - (1.0 + u0).abs().ln();
    match kind {
        Kernel::Plain => base,
        Kernel::Regularized => base - (-u_end).ln(),
    }
}

/// Contribution of the constant tail beyond the truncation point.
fn tail_term(kind: Kernel, tail: C64, u_end: f64, omega: C64) -> C64 {
    if kind == Kernel::Plain || tail == C64::new(0.0, 0.0) {
        return C64::new(0.0, 0.0);
    }
    -tail * (1.0 - omega / u_end).ln()
}

/// `(1/2πi) ∫ f K du` along the contour.
pub fn cauchy_integral(f: &CauchyIntegrand, omega: C64, mode: Mode, kind: Kernel) -> Result<C64> {
    let g = f.nodes;
    let vals = f.values;
    if vals.len() != g.len() {
        return Err(Error::Parameter("integrand length differs from node count".into()));
    }
    let u_end = g.u_end();
    let sum = match mode {
        Mode::OffCurve => {
            let (distance, spacing) = g.proximity(omega);
            if distance <= 3.0 * spacing {
                return Err(Error::Proximity { distance, spacing });
            }
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..g.len() {
                acc += g.wv[j] * g.du[j] * vals[j] * kernel_at(kind, g.u[j], omega);
            }
            acc + tail_term(kind, f.tail, u_end, omega)
        }
        Mode::NearCurve => {
            if omega.im == 0.0 && omega.re <= -1.0 && omega.re >= u_end {
                return Err(Error::Domain("point lies on the contour; use principal-value mode".into()));
            }
            let (p, v_star) = g.locate(omega.re);
            let f_star = g.rule.interpolate(vals, p, v_star);
            let u_star = omega.re;
            // First-order subtraction with s(u) = f* + D·(u − u*)·u*/u, which
            // matches f and df/du at the projection, stays bounded at infinity
            // and has a closed-form integral against either kernel.
            let slope = if u_star < -1.0 && u_star > u_end {
                let df = g.rule.interpolate(&g.rule.differentiate(vals), p, v_star);
                let du = g.rule.interpolate(&g.du, p, v_star);
                if du != 0.0 {
                    df / du
                } else {
                    C64::new(0.0, 0.0)
                }
            } else {
                C64::new(0.0, 0.0)
            };
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..g.len() {
                let uj = g.u[j];
                let s = f_star + slope * (uj - u_star) * u_star / uj;
                acc += g.wv[j] * g.du[j] * (vals[j] - s) * kernel_at(kind, uj, omega);
            }
            let log_ratio = (u_end - omega).ln() - (-1.0 - omega).ln();
            let c = (omega - u_star) / omega;
            let linear = match kind {
                Kernel::Plain => u_star / omega * (-u_end).ln() + c * log_ratio,
                Kernel::Regularized => c * (log_ratio - (-u_end).ln()) + u_star * (-1.0 / u_end - 1.0),
            };
            acc + f_star * kernel_integral(kind, u_end, omega)
                + slope * u_star * linear
                + tail_term(kind, f.tail, u_end, omega)
        }
        Mode::PrincipalValue(k) => {
            if k >= g.len() {
                return Err(Error::Parameter("principal-value node out of range".into()));
            }
            let u0 = g.u[k];
            let fk = vals[k];
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..g.len() {
                if j != k {
                    acc += g.wv[j] * g.du[j] * (vals[j] - fk) * kernel_at(kind, g.u[j], C64::new(u0, 0.0));
                }
            }
            // Removable diagonal term: lim (f − f_k)·u′/(u − u_k) = f′(v_k).
            let df = node_derivative(&g.rule, vals, k);
            acc += g.wv[k] * df;
            acc + fk * kernel_pv(kind, u_end, u0) + tail_term(kind, f.tail, u_end, C64::new(u0, 0.0))
        }
    };
    Ok(sum / TWO_PI_I)
}

fn node_derivative(rule: &PanelRule, values: &[C64], k: usize) -> C64 {
    let n = rule.order;
    let p = k / n;
    let i = k % n;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        acc += rule.diff[i * n + j] * values[p * n + j];
    }
    acc / rule.panel_half(p)
}

/// Principal values at every node.
pub fn principal_values(f: &CauchyIntegrand, kind: Kernel) -> Result<Vec<C64>> {
    (0..f.nodes.len()).map(|k| cauchy_integral(f, C64::new(0.0, 0.0), Mode::PrincipalValue(k), kind)).collect()
}

/// Boundary values from the principal value: the side below the contour in
/// the ω-plane (the left of the traversal) is `+½f + PV`, the side above is
/// `−½f + PV`.
pub fn plemelj_limits(f_at: C64, pv: C64) -> (C64, C64) {
    (0.5 * f_at + pv, -0.5 * f_at + pv)
}

/// Total argument variation of an ordered list of nonzero samples.
pub fn winding(values: &[C64]) -> Result<f64> {
    let mut total = 0.0;
    for (i, pair) in values.windows(2).enumerate() {
        if pair[0] == C64::new(0.0, 0.0) || pair[1] == C64::new(0.0, 0.0) {
            return Err(Error::Domain("zero sample in winding".into()));
        }
        let step = (pair[1] / pair[0]).arg();
        if step.abs() > 0.5 * PI {
            return Err(Error::Resolution { index: i, jump: step });
        }
        total += step;
    }
    Ok(total)
}
