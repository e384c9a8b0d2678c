//! Subcommands. Each returns the CSV document it produces.

use srbm_green::bvp::{Solver, SolverOptions};
use srbm_green::curve::{contour_grid, vertex};
use srbm_green::dim1::{green_1d, psi_1d, Dim1Params};
use srbm_green::gluing::GluingMap;
use srbm_green::kernel::branch_points;
use srbm_green::model::{classify, convergence_domain, existence_report};
use srbm_green::montecarlo::{
    estimate_psi, estimate_psi_boundary, occupation_histogram, BoxGrid, McEstimate,
};
use srbm_green::Complex64 as C64;

use crate::output::{num, Table};
use crate::{CliError, RunConfig};

fn solver(cfg: &RunConfig, nodes: usize) -> Result<Solver, CliError> {
    Ok(Solver::new(&cfg.model, SolverOptions { node_count: nodes, tol: cfg.quadrature_tol })?)
}

pub fn classify_cmd(cfg: &RunConfig) -> Result<String, CliError> {
    let p = &cfg.model;
    let rep = existence_report(p)?;
    let c = classify(p)?;
    let mut t = Table::new(cfg, &["key", "value"])?;
    t.row(["exists", &rep.exists.to_string()])?;
    t.row(["conjunctive_reading", &rep.conjunctive.to_string()])?;
    t.row(["disagrees_with_conjunctive", &rep.disagrees_with_conjunctive.to_string()])?;
    t.row(["borderline", &rep.borderline.to_string()])?;
    let regime = c.regime.map_or("none".to_string(), |r| format!("{r:?}"));
    t.row(["regime", &regime])?;
    t.row(["drift_sign_case", &format!("{:?}", c.drift_sign_case)])?;
    if let Ok(d) = branch_points(p).and_then(|k| convergence_domain(p, &k)) {
        t.row(["psi1_max_re", &num(d.psi1_max_re)])?;
        t.row(["psi1_closed", &d.psi1_closed.to_string()])?;
        t.row(["psi2_max_re", &num(d.psi2_max_re)])?;
        t.row(["psi2_closed", &d.psi2_closed.to_string()])?;
        t.row(["psi_box_1", &num(d.psi_box.0)])?;
        t.row(["psi_box_2", &num(d.psi_box.1)])?;
    }
    t.finish()
}

pub fn kernel_cmd(cfg: &RunConfig) -> Result<String, CliError> {
    let p = &cfg.model;
    let k = branch_points(p)?;
    let mut t = Table::new(cfg, &["key", "value"])?;
    let rows = [
        ("theta1_minus", k.theta1_minus),
        ("theta1_plus", k.theta1_plus),
        ("theta2_minus", k.theta2_minus),
        ("theta2_plus", k.theta2_plus),
        ("beta", k.beta),
        ("theta_star_1", k.theta_star.0),
        ("theta_star_2", k.theta_star.1),
        ("theta_star_star_1", k.theta_star_star.0),
        ("theta_star_star_2", k.theta_star_star.1),
        ("vertex", vertex(p, &k)),
    ];
    for (name, v) in rows {
        t.row([name, &num(v)])?;
    }
    t.row(["star_degenerate", &k.star_degenerate.to_string()])?;
    t.row(["star_star_degenerate", &k.star_star_degenerate.to_string()])?;
    t.finish()
}

pub fn curve_cmd(cfg: &RunConfig) -> Result<String, CliError> {
    let p = &cfg.model;
    let k = branch_points(p)?;
    let g = contour_grid(p, &k, cfg.quadrature_nodes, cfg.quadrature_tol)?;
    let mut t = Table::new(cfg, &["v", "theta1", "re_theta2", "im_theta2", "weight"])?;
    t.comment(format!("truncation_theta1={}", g.truncation_t1));
    for (j, pt) in g.points.iter().enumerate() {
        t.row([num(g.v[j]), num(pt.t1), num(pt.z.re), num(pt.z.im), num(g.weights[j])])?;
    }
    t.finish()
}

pub fn glue_cmd(cfg: &RunConfig, theta2: C64) -> Result<String, CliError> {
    let gm = GluingMap::new(&branch_points(&cfg.model)?);
    let w = gm.w(theta2)?;
    let d = gm.w_prime(theta2)?;
    let mut t = Table::new(cfg, &["re_w", "im_w", "re_wprime", "im_wprime", "re_W", "im_W"])?;
    let big = gm.big_w(theta2).map_or([f64::NAN; 2], |b| [b.re, b.im]);
    t.row([num(w.re), num(w.im), num(d.re), num(d.im), num(big[0]), num(big[1])])?;
    t.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Face1,
    Face2,
    Interior,
}

fn evaluate(s: &Solver, what: Transform, a: C64, b: C64) -> Result<srbm_green::bvp::Evaluation, CliError> {
    Ok(match what {
        Transform::Face1 => s.psi1(a)?,
        Transform::Face2 => s.psi2(a)?,
        Transform::Interior => s.psi_interior(a, b)?,
    })
}

/// ψ1, ψ2 or ψ with the change from halving the node count as error estimate.
pub fn psi_cmd(cfg: &RunConfig, what: Transform, a: C64, b: C64) -> Result<String, CliError> {
    let fine = solver(cfg, cfg.quadrature_nodes)?;
    let v = evaluate(&fine, what, a, b)?;
    let err = solver(cfg, cfg.quadrature_nodes / 2)
        .and_then(|s| evaluate(&s, what, a, b))
        .map_or(f64::NAN, |c| (v.value - c.value).norm());
    let mut t = Table::new(cfg, &["re", "im", "abs_err_estimate"])?;
    t.comment(format!("method={}", v.method.label()));
    if v.caveat {
        t.comment("caveat=non-positive drift component");
    }
    t.row([num(v.value.re), num(v.value.im), num(err)])?;
    t.finish()
}

/// ψ1 along the segment from `from` to `to`.
pub fn plot_data_cmd(cfg: &RunConfig, from: C64, to: C64, n: usize) -> Result<String, CliError> {
    if n < 2 {
        return Err(CliError::Argument("at least two points are needed".into()));
    }
    let s = solver(cfg, cfg.quadrature_nodes)?;
    let mut t = Table::new(cfg, &["re_theta2", "im_theta2", "re_psi1", "im_psi1"])?;
    for i in 0..n {
        let z = from + (to - from) * (i as f64 / (n - 1) as f64);
        let v = s.psi1(z).map_or(C64::new(f64::NAN, f64::NAN), |e| e.value);
        t.row([num(z.re), num(z.im), num(v.re), num(v.im)])?;
    }
    t.finish()
}

fn fmt_mean(m: C64) -> String {
    if m.im == 0.0 {
        num(m.re)
    } else {
        format!("{:?}{:+?}i", m.re, m.im)
    }
}

fn mc_row(t: &mut Table, e: &McEstimate) -> Result<(), CliError> {
    let c = &e.config;
    t.row([fmt_mean(e.mean), num(e.stderr), e.paths.to_string(), num(c.dt), num(c.t_max), c.seed.to_string()])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McTarget {
    Interior(C64, C64),
    Face(usize, C64),
    Histogram(BoxGrid),
}

pub fn mc_cmd(cfg: &RunConfig, target: McTarget) -> Result<String, CliError> {
    let p = &cfg.model;
    match target {
        McTarget::Interior(a, b) => {
            let e = estimate_psi(p, (a, b), &cfg.sim)?;
            let mut t = Table::new(cfg, &["mean", "stderr", "paths", "dt", "tmax", "seed"])?;
            mc_row(&mut t, &e)?;
            t.finish()
        }
        McTarget::Face(i, z) => {
            let e = estimate_psi_boundary(p, i, z, &cfg.sim)?;
            let mut t = Table::new(cfg, &["mean", "stderr", "paths", "dt", "tmax", "seed"])?;
            mc_row(&mut t, &e)?;
            t.finish()
        }
        McTarget::Histogram(grid) => {
            let h = occupation_histogram(p, &grid, &cfg.sim)?;
            let mut t = Table::new(cfg, &["i", "j", "mean", "stderr"])?;
            for (i, col) in h.iter().enumerate() {
                for (j, e) in col.iter().enumerate() {
                    t.row([i.to_string(), j.to_string(), num(e.mean.re), num(e.stderr)])?;
                }
            }
            t.finish()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dim1Query {
    Green(f64),
    Transform(C64),
}

pub fn dim1_cmd(cfg: &RunConfig, q: &Dim1Params, query: Dim1Query) -> Result<String, CliError> {
    match query {
        Dim1Query::Green(x) => {
            let mut t = Table::new(cfg, &["x0", "x", "green"])?;
            t.row([num(q.x0), num(x), num(green_1d(q, x)?)])?;
            t.finish()
        }
        Dim1Query::Transform(z) => {
            let v = psi_1d(q, z)?;
            let mut t = Table::new(cfg, &["re_theta", "im_theta", "re", "im"])?;
            t.row([num(z.re), num(z.im), num(v.re), num(v.im)])?;
            t.finish()
        }
    }
}
