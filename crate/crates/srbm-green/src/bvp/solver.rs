use num_complex::Complex64 as C64;

use super::face::FaceSolution;
use crate::error::{Error, Result};
use crate::kernel::{gamma, gamma1, gamma2, theta1_branch, Sign};
use crate::model::{classify, DriftSignCase, ModelParams, Regime};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// The Cauchy-integral formula, inside the domain bounded by the hyperbola.
    Direct,
    /// The kernel identity applied to the other face's transform.
    Continuation,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Continuation => "continuation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: C64,
    pub method: Method,
    /// The drift has a non-positive component; the formula is used outside
    /// the setting where it was validated.
    pub caveat: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub node_count: usize,
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { node_count: 512, tol: 1e-8 }
    }
}

/// Value affine in the two free constants: `p + c·C`.
#[derive(Debug, Clone, Copy)]
struct Affine {
    p: C64,
    c: [C64; 2],
    method: Method,
}

/// Offsets from the vertex where the kernel identity fixes free constants.
const PROBES: [C64; 4] = [
    C64::new(-1.0, 0.5),
    C64::new(-2.0, -1.0),
    C64::new(-0.7, 0.0),
    C64::new(-1.5, 1.0),
];

const MAX_DEPTH: usize = 2;

/// Both boundary transforms of one instance, with their free constants fixed.
#[derive(Debug, Clone)]
pub struct Solver {
    pub params: ModelParams,
    /// Face 1 for the model, face 2 as face 1 of the swapped model.
    pub faces: [FaceSolution; 2],
    /// Constants multiplying the homogeneous solutions (zero when not free).
    pub constants: [C64; 2],
    /// Which constants were free.
    pub free: [bool; 2],
    /// Largest residual of the conditions used to fix the constants.
    pub fit_residual: f64,
    caveat: bool,
}

fn exp_dot(p: &ModelParams, t1: C64, t2: C64) -> C64 {
    (t1 * p.x1 + t2 * p.x2).exp()
}

impl Solver {
    pub fn new(p: &ModelParams, opts: SolverOptions) -> Result<Self> {
        let c = classify(p)?;
        if !c.exists {
            return Err(Error::Parameter("no reflected process exists for this reflection matrix".into()));
        }
        if c.regime != Some(Regime::Transient) {
            return Err(Error::NotTransient);
        }
        let f1 = FaceSolution::new(p, opts.node_count, opts.tol)?;
        let f2 = FaceSolution::new(&p.swapped(), opts.node_count, opts.tol)?;
        let free = [f1.boundary.chi_sign == 0, f2.boundary.chi_sign == 0];
        let mut s = Self {
            params: *p,
            faces: [f1, f2],
            constants: [C64::new(0.0, 0.0); 2],
            free,
            fit_residual: 0.0,
            caveat: c.drift_sign_case != DriftSignCase::PP,
        };
        if free[0] || free[1] {
            s.fit_constants()?;
        }
        Ok(s)
    }

    /// ψ1 at θ2 as an affine function of the constants.
    fn face1(&self, theta2: C64, depth: usize) -> Result<Affine> {
        let f = &self.faces[0];
        if f.contains(theta2) {
            let (p, y) = f.parts(theta2)?;
            return Ok(Affine { p, c: [y, C64::new(0.0, 0.0)], method: Method::Direct });
        }
        if depth == 0 {
            return Err(Error::Domain(format!("θ2 = {theta2} is not reachable by continuation")));
        }
        let p = &self.params;
        let t1 = theta1_branch(p, &f.geometry, theta2, Sign::Minus);
        if !self.faces[1].contains(t1) {
            return Err(Error::Domain(format!("θ2 = {theta2} is not reachable by continuation")));
        }
        let other = self.face2(t1, depth - 1)?;
        let (g1, g2) = (gamma1(p, t1, theta2), gamma2(p, t1, theta2));
        if g1.norm() < 1e-300 {
            return Err(Error::Pole { what: "continued ψ1", location: theta2 });
        }
        Ok(Affine {
            p: -(g2 * other.p + exp_dot(p, t1, theta2)) / g1,
            c: [-g2 * other.c[0] / g1, -g2 * other.c[1] / g1],
            method: Method::Continuation,
        })
    }

    /// ψ2 at θ1 as an affine function of the constants.
    fn face2(&self, theta1: C64, depth: usize) -> Result<Affine> {
        let f = &self.faces[1];
        if f.contains(theta1) {
            let (p, y) = f.parts(theta1)?;
            return Ok(Affine { p, c: [C64::new(0.0, 0.0), y], method: Method::Direct });
        }
        if depth == 0 {
            return Err(Error::Domain(format!("θ1 = {theta1} is not reachable by continuation")));
        }
        let p = &self.params;
        let t2 = theta1_branch(&f.params, &f.geometry, theta1, Sign::Minus);
        if !self.faces[0].contains(t2) {
            return Err(Error::Domain(format!("θ1 = {theta1} is not reachable by continuation")));
        }
        let other = self.face1(t2, depth - 1)?;
        let (g1, g2) = (gamma1(p, theta1, t2), gamma2(p, theta1, t2));
        if g2.norm() < 1e-300 {
            return Err(Error::Pole { what: "continued ψ2", location: theta1 });
        }
        Ok(Affine {
            p: -(g1 * other.p + exp_dot(p, theta1, t2)) / g2,
            c: [-g1 * other.c[0] / g2, -g1 * other.c[1] / g2],
            method: Method::Continuation,
        })
    }

    /// Rows `a·C = b` from the exact values at the intersection points and
    /// from the kernel identity at probe points.
    fn conditions(&self) -> Vec<([C64; 2], C64)> {
        let p = &self.params;
        let k = &self.faces[0].geometry;
        let mut rows = Vec::new();
        let (a, b) = k.theta_star_star;
        if !k.star_star_degenerate && a <= 0.0 && b <= 0.0 {
            let (a, b) = (C64::new(a, 0.0), C64::new(b, 0.0));
            if let Ok(r) = self.face1(b, MAX_DEPTH) {
                let g1 = gamma1(p, a, b);
                rows.push(([g1 * r.c[0], g1 * r.c[1]], -exp_dot(p, a, b) - g1 * r.p));
            }
        }
        let (a, b) = k.theta_star;
        if !k.star_degenerate && a <= 0.0 && b <= 0.0 {
            let (a, b) = (C64::new(a, 0.0), C64::new(b, 0.0));
            if let Ok(r) = self.face2(a, MAX_DEPTH) {
                let g2 = gamma2(p, a, b);
                rows.push(([g2 * r.c[0], g2 * r.c[1]], -exp_dot(p, a, b) - g2 * r.p));
            }
        }
        // Probe pairs from both faces, so that the fit is symmetric under the swap.
        let mut pairs = Vec::new();
        let v1 = crate::curve::vertex(p, k);
        for off in PROBES {
            let t2 = v1 + off;
            pairs.push((theta1_branch(p, k, t2, Sign::Minus), t2));
        }
        let (q, kq) = (&self.faces[1].params, &self.faces[1].geometry);
        let v2 = crate::curve::vertex(q, kq);
        for off in PROBES {
            let t1 = v2 + off;
            pairs.push((t1, theta1_branch(q, kq, t1, Sign::Minus)));
        }
        for (t1, t2) in pairs {
            if !(self.faces[0].contains(t2) && self.faces[1].contains(t1)) {
                continue;
            }
            let (Ok(r1), Ok(r2)) = (self.face1(t2, 0), self.face2(t1, 0)) else { continue };
            let (g1, g2) = (gamma1(p, t1, t2), gamma2(p, t1, t2));
            rows.push((
                [g1 * r1.c[0] + g2 * r2.c[0], g1 * r1.c[1] + g2 * r2.c[1]],
                -exp_dot(p, t1, t2) - g1 * r1.p - g2 * r2.p,
            ));
        }
        rows
    }

    fn fit_constants(&mut self) -> Result<()> {
        let rows = self.conditions();
        let cols: Vec<usize> = (0..2).filter(|&i| self.free[i]).collect();
        let sol = least_squares(&rows, &cols)?;
        for (i, &c) in cols.iter().enumerate() {
            self.constants[c] = sol[i];
        }
        self.fit_residual = rows
            .iter()
            .map(|(a, b)| {
                let lhs = a[0] * self.constants[0] + a[1] * self.constants[1];
                (lhs - b).norm() / (1.0 + b.norm())
            })
            .fold(0.0, f64::max);
        Ok(())
    }

    fn finish(&self, a: Affine) -> Evaluation {
        Evaluation {
            value: a.p + a.c[0] * self.constants[0] + a.c[1] * self.constants[1],
            method: a.method,
            caveat: self.caveat,
        }
    }

    /// Transform of the local time on face 1, `E∫e^{θ2 Z2} dL1`.
    pub fn psi1(&self, theta2: C64) -> Result<Evaluation> {
        Ok(self.finish(self.face1(theta2, MAX_DEPTH)?))
    }

    /// Transform of the local time on face 2, `E∫e^{θ1 Z1} dL2`.
    pub fn psi2(&self, theta1: C64) -> Result<Evaluation> {
        Ok(self.finish(self.face2(theta1, MAX_DEPTH)?))
    }

    /// Interior transform from the functional equation.
    pub fn psi_interior(&self, theta1: C64, theta2: C64) -> Result<Evaluation> {
        let p = &self.params;
        let g = gamma(p, theta1, theta2);
        let scale = 1.0 + theta1.norm_sqr() + theta2.norm_sqr();
        if g.norm() <= 1e-12 * scale {
            return Err(Error::Removable { theta: (theta1, theta2) });
        }
        let a = self.psi1(theta2)?;
        let b = self.psi2(theta1)?;
        let value = -(gamma1(p, theta1, theta2) * a.value
            + gamma2(p, theta1, theta2) * b.value
            + exp_dot(p, theta1, theta2))
            / g;
        let method = if a.method == Method::Direct && b.method == Method::Direct {
            Method::Direct
        } else {
            Method::Continuation
        };
        Ok(Evaluation { value, method, caveat: self.caveat })
    }

    /// Limits of ψ1 at grid node `j` of the contour, approached from inside
    /// the domain along the real direction, at `conj t_j` and at `t_j`.
    /// Two step sizes are combined by Richardson extrapolation.
    pub fn psi1_boundary_limits(&self, j: usize) -> Result<(C64, C64)> {
        let t = self.faces[0].grid.points[j].z;
        let step = 1e-4 * (1.0 + t.norm());
        let limit = |z: C64| -> Result<C64> {
            let a = self.psi1(z - step)?.value;
            let b = self.psi1(z - 0.5 * step)?.value;
            Ok(2.0 * b - a)
        };
        Ok((limit(t.conj())?, limit(t)?))
    }
}

/// Complex least squares in the selected columns, through the normal
/// equations. Reports an undetermined system when the smallest singular
/// value is below 1e−6 of the largest.
fn least_squares(rows: &[([C64; 2], C64)], cols: &[usize]) -> Result<Vec<C64>> {
    let n = cols.len();
    if rows.len() < n {
        return Err(Error::UndeterminedConstant);
    }
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    let mut rhs = [C64::new(0.0, 0.0); 2];
    for (a, b) in rows {
        for i in 0..n {
            for j in 0..n {
                m[i][j] += a[cols[i]].conj() * a[cols[j]];
            }
            rhs[i] += a[cols[i]].conj() * b;
        }
    }
    match n {
        1 => {
            if m[0][0].re <= 0.0 {
                return Err(Error::UndeterminedConstant);
            }
            Ok(vec![rhs[0] / m[0][0]])
        }
        2 => {
            let tr = m[0][0].re + m[1][1].re;
            let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re;
            let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
            let (hi, lo) = (0.5 * (tr + disc), 0.5 * (tr - disc));
            if hi <= 0.0 || lo <= 0.0 || (lo / hi).sqrt() < 1e-6 {
                return Err(Error::UndeterminedConstant);
            }
            let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            Ok(vec![
                (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / d,
                (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / d,
            ])
        }
        _ => Ok(Vec::new()),
    }
}

/// ψ1 with default quadrature settings.
pub fn psi1(p: &ModelParams, theta2: C64) -> Result<Evaluation> {
    Solver::new(p, SolverOptions::default())?.psi1(theta2)
}

/// ψ2 with default quadrature settings.
pub fn psi2(p: &ModelParams, theta1: C64) -> Result<Evaluation> {
    Solver::new(p, SolverOptions::default())?.psi2(theta1)
}

/// ψ with default quadrature settings.
pub fn psi_interior(p: &ModelParams, theta1: C64, theta2: C64) -> Result<Evaluation> {
    Solver::new(p, SolverOptions::default())?.psi_interior(theta1, theta2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn canonical_spot_values() {
        let s = Solver::new(&ModelParams::canonical(), SolverOptions::default()).unwrap();
        let exact = (-2.0f64).exp() / 2.0;
        let a = s.psi1(c(0.0)).unwrap();
        assert_eq!(a.method, Method::Continuation);
        assert_abs_diff_eq!((a.value - exact).norm() / exact, 0.0, epsilon = 1e-9);
        let b = s.psi2(c(0.0)).unwrap();
        assert_abs_diff_eq!((b.value - exact).norm() / exact, 0.0, epsilon = 1e-9);
        let v = s.psi1(c(-0.5)).unwrap();
        assert_abs_diff_eq!(v.value.re, 0.0248092295578177, epsilon = 1e-10);
        let psi = s.psi_interior(c(-0.5), c(-0.5)).unwrap();
        assert_abs_diff_eq!(psi.value.re, 0.457426948818166, epsilon = 1e-9);
    }

    #[test]
    fn symmetric_instance_has_equal_faces() {
        let s = Solver::new(&ModelParams::canonical(), SolverOptions::default()).unwrap();
        for &t in &[c(-1.5), C64::new(-2.0, 0.8), C64::new(-4.0, -2.0)] {
            let a = s.psi1(t).unwrap().value;
            let b = s.psi2(t).unwrap().value;
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn on_the_ellipse_is_removable() {
        let s = Solver::new(&ModelParams::canonical(), SolverOptions::default()).unwrap();
        assert!(matches!(s.psi_interior(c(0.0), c(-2.0)), Err(Error::Removable { .. })));
    }

    #[test]
    fn recurrent_instance_is_rejected() {
        let p = ModelParams { mu1: -1.0, mu2: -1.0, ..ModelParams::canonical() };
        assert!(matches!(Solver::new(&p, SolverOptions::default()), Err(Error::NotTransient)));
    }

    #[test]
    fn free_constant_is_fixed() {
        // Index 0 on face 1: the homogeneous solution decays, so its
        // coefficient comes from the exact value at the intersection point.
        let p = ModelParams { r12: -0.6, r21: 0.2, ..ModelParams::canonical() };
        let s = Solver::new(&p, SolverOptions::default()).unwrap();
        assert!(s.free[0]);
        let k = &s.faces[0].geometry;
        let (a, b) = k.theta_star_star;
        let want = -(a * p.x1 + b * p.x2).exp() / (a + p.r21 * b);
        let got = s.psi1(c(b)).unwrap().value;
        assert_abs_diff_eq!((got - want).norm() / want.abs(), 0.0, epsilon = 1e-6);
        assert!(s.fit_residual < 1e-6);
    }
}
