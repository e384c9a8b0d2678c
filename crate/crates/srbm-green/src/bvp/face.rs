use num_complex::Complex64 as C64;

use super::boundary::{boundary_data, BoundaryData};
use crate::curve::{contour_grid, in_domain, stretch_point, ContourGrid};
use crate::error::{Error, Result};
use crate::gluing::GluingMap;
use crate::kernel::{branch_points, KernelGeometry};
use crate::model::ModelParams;
use crate::quadrature::{cauchy_integral, principal_values, CauchyIntegrand, CurveNodes, Kernel, Mode};

/// Solution of the boundary value problem of one face, up to the free
/// constant of the homogeneous problem: `ψ1 = Y·(Φ + C)`, where `Y` is the
/// fundamental function and `Φ` the Cauchy integral of `g/Y⁺`.
#[derive(Debug, Clone)]
pub struct FaceSolution {
    pub params: ModelParams,
    pub geometry: KernelGeometry,
    pub gluing: GluingMap,
    pub grid: ContourGrid,
    pub nodes: CurveNodes,
    pub boundary: BoundaryData,
    /// Principal values of the regularised Cauchy integral of `log G`.
    pub pv_log_g: Vec<C64>,
    /// `Y⁺` at the nodes.
    pub y_plus: Vec<C64>,
    /// `g/Y⁺` at the nodes.
    pub density: Vec<C64>,
    /// Principal values of the Cauchy integral of the density.
    pub pv_density: Vec<C64>,
}

fn curve_nodes(p: &ModelParams, k: &KernelGeometry, gm: &GluingMap, grid: &ContourGrid) -> Result<CurveNodes> {
    let mut u = Vec::with_capacity(grid.node_count);
    let mut du = Vec::with_capacity(grid.node_count);
    for (pt, dz) in grid.points.iter().zip(&grid.dz_dv) {
        u.push(gm.w(pt.z)?.re);
        du.push((gm.w_prime(pt.z)? * dz).re);
    }
    let mut u_edges = vec![-1.0];
    for &v in &grid.rule.edges[1..] {
        let (_, z, _) = stretch_point(p, k, v);
        u_edges.push(gm.w(z)?.re);
    }
    Ok(CurveNodes { rule: grid.rule.clone(), v: grid.v.clone(), wv: grid.v_weights.clone(), u, du, u_edges })
}

impl FaceSolution {
    pub fn new(p: &ModelParams, node_count: usize, tol: f64) -> Result<Self> {
        let k = branch_points(p)?;
        let gm = GluingMap::new(&k);
        let grid = contour_grid(p, &k, node_count, tol)?;
        let nodes = curve_nodes(p, &k, &gm, &grid)?;
        let bd = boundary_data(p, &k, &grid)?;
        let lg = CauchyIntegrand::new(&bd.log_g_vals, &nodes).with_tail(bd.log_g_infinity);
        let pv_log_g = principal_values(&lg, Kernel::Regularized)?;
        let y_plus: Vec<C64> = bd.log_g_vals.iter().zip(&pv_log_g).map(|(l, pv)| (0.5 * l + pv).exp()).collect();
        let density: Vec<C64> = bd.g_vals.iter().zip(&y_plus).map(|(g, y)| g / y).collect();
        let pv_density = principal_values(&CauchyIntegrand::new(&density, &nodes), Kernel::Plain)?;
        Ok(Self {
            params: *p,
            geometry: k,
            gluing: gm,
            grid,
            nodes,
            boundary: bd,
            pv_log_g,
            y_plus,
            density,
            pv_density,
        })
    }

    fn mode(&self, omega: C64) -> Mode {
        let (distance, spacing) = self.nodes.proximity(omega);
        if distance > 3.0 * spacing {
            Mode::OffCurve
        } else {
            Mode::NearCurve
        }
    }

    fn omega(&self, theta2: C64) -> Result<C64> {
        let omega = self.gluing.w(theta2)?;
        if omega.im == 0.0 && omega.re <= -1.0 {
            return Err(Error::Domain(format!("θ2 = {theta2} maps onto the contour image")));
        }
        Ok(omega)
    }

    /// Whether the direct formula applies at θ2.
    pub fn contains(&self, theta2: C64) -> bool {
        in_domain(&self.params, &self.geometry, theta2)
    }

    /// `log Y` at a point of the glued plane.
    pub fn log_y_at(&self, omega: C64) -> Result<C64> {
        let f = CauchyIntegrand::new(&self.boundary.log_g_vals, &self.nodes).with_tail(self.boundary.log_g_infinity);
        cauchy_integral(&f, omega, self.mode(omega), Kernel::Regularized)
    }

    /// The fundamental function at θ2, normalised to 1 where `w = 0`.
    #[allow(non_snake_case)]
    pub fn Y_of(&self, theta2: C64) -> Result<C64> {
        Ok(self.log_y_at(self.omega(theta2)?)?.exp())
    }

    /// Boundary value of `Y` at node `j` from the side of `conj t_j`.
    #[allow(non_snake_case)]
    pub fn Y_plus(&self, j: usize) -> C64 {
        self.y_plus[j]
    }

    /// `(Y·Φ, Y)` at θ2, so that `ψ1 = Y·Φ + C·Y`.
    pub fn parts(&self, theta2: C64) -> Result<(C64, C64)> {
        let omega = self.omega(theta2)?;
        let y = self.log_y_at(omega)?.exp();
        let f = CauchyIntegrand::new(&self.density, &self.nodes);
        let phi = cauchy_integral(&f, omega, self.mode(omega), Kernel::Plain)?;
        Ok((y * phi, y))
    }

    /// `(Y·Φ, Y)` on both lips at node `j`: first at `conj t_j`, then at `t_j`.
    pub fn node_parts(&self, j: usize) -> ((C64, C64), (C64, C64)) {
        let lg = self.boundary.log_g_vals[j];
        let y_minus = (-0.5 * lg + self.pv_log_g[j]).exp();
        let y_plus = self.y_plus[j];
        let f = self.density[j];
        let pv = self.pv_density[j];
        ((y_plus * (0.5 * f + pv), y_plus), (y_minus * (-0.5 * f + pv), y_minus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn canonical_direct_values() {
        // Independent semi-analytic values for this instance.
        let face = FaceSolution::new(&ModelParams::canonical(), 512, 1e-8).unwrap();
        for &(t, want) in &[
            (C64::new(-1.5, 0.0), C64::new(0.00708034132120810, 0.0)),
            (C64::new(-3.0, 0.0), C64::new(0.00239272049659371, 0.0)),
            (C64::new(-1.5, 0.7), C64::new(0.00503107810917838, 0.00392985688384769)),
            (C64::new(-2.0, -1.0), C64::new(0.00285965245595729, -0.00268574595897105)),
        ] {
            let (p, _) = face.parts(t).unwrap();
            assert_abs_diff_eq!((p - want).norm() / want.norm(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn fundamental_function_normalisation_and_symmetry() {
        let face = FaceSolution::new(&ModelParams::canonical(), 512, 1e-8).unwrap();
        let zero = C64::new(face.gluing.zero_of_w(), 0.0);
        assert_abs_diff_eq!((face.Y_of(zero).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-12);
        let t = C64::new(-2.2, 0.9);
        let a = face.Y_of(t).unwrap();
        let b = face.Y_of(t.conj()).unwrap();
        assert_abs_diff_eq!((a - b.conj()).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn boundary_values_jump_by_g() {
        let face = FaceSolution::new(&ModelParams::canonical(), 512, 1e-8).unwrap();
        for j in (0..512).step_by(37) {
            let ((pu, yu), (pl, yl)) = face.node_parts(j);
            let g = face.boundary.g_vals[j];
            let gg = face.boundary.G_vals[j];
            assert_abs_diff_eq!((pu - gg * pl - g).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((yu - gg * yl).norm(), 0.0, epsilon = 1e-12 * yu.norm());
            // |G| = 1 here, so both limits have the same modulus.
            assert_abs_diff_eq!(yu.norm() / yl.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn approach_limit_of_y() {
        let face = FaceSolution::new(&ModelParams::canonical(), 512, 1e-8).unwrap();
        for &j in &[40usize, 150, 300] {
            let t = face.grid.points[j].z.conj();
            let f = |e: f64| face.Y_of(t - e).unwrap();
            let e = 1e-5;
            let extrapolated = 2.0 * f(e / 2.0) - f(e);
            assert_abs_diff_eq!((extrapolated - face.Y_plus(j)).norm() / face.Y_plus(j).norm(), 0.0, epsilon = 1e-5);
        }
    }
}
