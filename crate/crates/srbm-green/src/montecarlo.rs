//! Monte Carlo simulation of the reflected process, used as an independent
//! check of the transforms.
//!
//! Each step draws the free Gaussian increment and, near a face, the running
//! minimum of the Brownian bridge over the step. The complementarity problem
//! is solved at that minimum, which captures the local time accrued inside
//! the step instead of only at its end point.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dim1::Dim1Params;
use crate::error::{Error, Result};
use crate::kernel::branch_points;
use crate::model::{classify, convergence_domain, ModelParams, Regime};

/// Discretisation of the reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Complementarity step at the bridge minimum of each coordinate.
    #[default]
    Bridge,
    /// Complementarity step at the end point of the free step only.
    Projected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub paths: usize,
    pub seed: u64,
    pub scheme: Scheme,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_max: 30.0, paths: 100_000, seed: 42, scheme: Scheme::Bridge }
    }
}

impl SimConfig {
    pub fn new(dt: f64, t_max: f64, paths: usize, seed: u64) -> Result<Self> {
        let c = Self { dt, t_max, paths, seed, scheme: Scheme::Bridge };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Parameter(format!("time step {} must be positive", self.dt)));
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(Error::Parameter(format!("horizon {} shorter than the step", self.t_max)));
        }
        if self.paths < 2 {
            return Err(Error::Parameter("at least two paths are needed for an error estimate".into()));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

/// Sample mean over paths with its standard error. `stderr` already includes
/// `bias_bound`, the bound on what the finite horizon leaves out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: C64,
    pub stderr: f64,
    pub sampling_stderr: f64,
    pub bias_bound: f64,
    pub paths: usize,
    pub config: SimConfig,
}

/// Position and accumulated local times of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    pub z: [f64; 2],
    pub l: [f64; 2],
}

/// Solves `y + R·dL ≥ 0`, `dL ≥ 0`, complementarity, trying the active sets
/// ∅, {1}, {2}, {1,2} in that order.
pub fn solve_lcp(p: &ModelParams, y: [f64; 2]) -> Result<[f64; 2]> {
    if y[0] >= 0.0 && y[1] >= 0.0 {
        return Ok([0.0, 0.0]);
    }
    if y[0] <= 0.0 && y[1] - p.r21 * y[0] >= 0.0 {
        return Ok([-y[0], 0.0]);
    }
    if y[1] <= 0.0 && y[0] - p.r12 * y[1] >= 0.0 {
        return Ok([0.0, -y[1]]);
    }
    let det = 1.0 - p.r12 * p.r21;
    if det != 0.0 {
        let l1 = (-y[0] + p.r12 * y[1]) / det;
        let l2 = (-y[1] + p.r21 * y[0]) / det;
        if l1 >= 0.0 && l2 >= 0.0 {
            return Ok([l1, l2]);
        }
    }
    Err(Error::ReflectionFailure)
}

/// One projected step: `z + dw + μ dt` pushed back into the quadrant along
/// the reflection directions.
pub fn reflect_step(p: &ModelParams, z: [f64; 2], dw: [f64; 2], dt: f64) -> Result<([f64; 2], [f64; 2])> {
    let y = [z[0] + dw[0] + p.mu1 * dt, z[1] + dw[1] + p.mu2 * dt];
    let dl = solve_lcp(p, y)?;
    let mut zn = [y[0] + dl[0] + p.r12 * dl[1], y[1] + p.r21 * dl[0] + dl[1]];
    // Active faces are hit exactly.
    for i in 0..2 {
        if dl[i] > 0.0 || zn[i] < 0.0 {
            zn[i] = 0.0;
        }
    }
    Ok((zn, dl))
}

/// Minimum over a step of a Brownian bridge from 0 to `x` with variance
/// rate `var`, given a uniform `u` in (0, 1].
fn bridge_minimum(x: f64, var: f64, dt: f64, u: f64) -> f64 {
    0.5 * (x - (x * x - 2.0 * var * dt * u.ln()).sqrt())
}

fn stream(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Bridge crossings below this exponent are ignored.
const CROSSING_EXPONENT: f64 = 40.0;

struct Stepper {
    p: ModelParams,
    chol: [f64; 3],
    dt: f64,
    sqrt_dt: f64,
    scheme: Scheme,
}

impl Stepper {
    fn new(p: &ModelParams, cfg: &SimConfig) -> Self {
        let l11 = p.sigma11.sqrt();
        let l21 = p.sigma12 / l11;
        let l22 = (p.sigma22 - l21 * l21).sqrt();
        Self { p: *p, chol: [l11, l21, l22], dt: cfg.dt, sqrt_dt: cfg.dt.sqrt(), scheme: cfg.scheme }
    }

    fn step(&self, rng: &mut ChaCha8Rng, z: [f64; 2]) -> Result<([f64; 2], [f64; 2])> {
        let n1: f64 = rng.sample(StandardNormal);
        let n2: f64 = rng.sample(StandardNormal);
        let dw = [self.chol[0] * n1 * self.sqrt_dt, (self.chol[1] * n1 + self.chol[2] * n2) * self.sqrt_dt];
        if self.scheme == Scheme::Projected {
            return reflect_step(&self.p, z, dw, self.dt);
        }
        let p = &self.p;
        let x = [dw[0] + p.mu1 * self.dt, dw[1] + p.mu2 * self.dt];
        let var = [p.sigma11, p.sigma22];
        let mut y = [0.0; 2];
        for i in 0..2 {
            let end = z[i] + x[i];
            let far = z[i] > 0.0 && end > 0.0 && 2.0 * z[i] * end > CROSSING_EXPONENT * var[i] * self.dt;
            let m = if far { x[i].min(0.0) } else { bridge_minimum(x[i], var[i], self.dt, uniform_open(rng)) };
            y[i] = z[i] + m;
        }
        let dl = solve_lcp(p, y)?;
        let zn = [
            (z[0] + x[0] + dl[0] + p.r12 * dl[1]).max(0.0),
            (z[1] + x[1] + p.r21 * dl[0] + dl[1]).max(0.0),
        ];
        Ok((zn, dl))
    }
}

/// Running count, mean and sum of squared deviations of several channels.
#[derive(Debug, Clone)]
struct Stats {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Stats {
    fn new(channels: usize) -> Self {
        Self { n: 0.0, mean: vec![0.0; channels], m2: vec![0.0; channels] }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1.0;
        for i in 0..x.len() {
            let d = x[i] - self.mean[i];
            self.mean[i] += d / self.n;
            self.m2[i] += d * (x[i] - self.mean[i]);
        }
    }

    fn merge(a: &Stats, b: &Stats) -> Stats {
        let n = a.n + b.n;
        if n == 0.0 {
            return a.clone();
        }
        let mut out = Stats::new(a.mean.len());
        out.n = n;
        for i in 0..a.mean.len() {
            let d = b.mean[i] - a.mean[i];
            out.mean[i] = a.mean[i] + d * b.n / n;
            out.m2[i] = a.m2[i] + b.m2[i] + d * d * a.n * b.n / n;
        }
        out
    }

    fn variance(&self, i: usize) -> f64 {
        if self.n > 1.0 {
            self.m2[i] / (self.n - 1.0)
        } else {
            0.0
        }
    }
}

/// Pairwise combination in a fixed tree, so the result does not depend on
/// how blocks were scheduled.
fn merge_tree(blocks: &[Stats]) -> Stats {
    match blocks.len() {
        1 => blocks[0].clone(),
        n => {
            let (a, b) = blocks.split_at(n / 2);
            Stats::merge(&merge_tree(a), &merge_tree(b))
        }
    }
}

const BLOCK: usize = 256;

/// Runs `path` for every path index, in parallel blocks, and reduces the
/// returned channel values.
fn run<F>(cfg: &SimConfig, channels: usize, path: F) -> Result<Stats>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
{
    cfg.check()?;
    let blocks = cfg.paths.div_ceil(BLOCK);
    let stats: Vec<Stats> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut s = Stats::new(channels);
            for i in b * BLOCK..((b + 1) * BLOCK).min(cfg.paths) {
                let mut rng = stream(cfg.seed, i);
                s.push(&path(i, &mut rng)?);
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    Ok(merge_tree(&stats))
}

/// Functional of a path whose expectation is one of the transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// `∫ e^{θ·Z} dt`.
    Interior(C64, C64),
    /// `∫ e^{θ2 Z2} dL1`.
    Face1(C64),
    /// `∫ e^{θ1 Z1} dL2`.
    Face2(C64),
}

/// `constant + Σ coefficient·functional`, estimated path by path so that
/// correlations between the terms enter the standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub terms: Vec<(C64, Functional)>,
    pub constant: C64,
}

impl From<Functional> for Combination {
    fn from(f: Functional) -> Self {
        Self { terms: vec![(C64::new(1.0, 0.0), f)], constant: C64::new(0.0, 0.0) }
    }
}

fn cexp(re: f64, im: f64) -> C64 {
    let m = re.exp();
    if im == 0.0 {
        C64::new(m, 0.0)
    } else {
        C64::from_polar(m, im)
    }
}

fn value_at(f: &Functional, z: [f64; 2]) -> C64 {
    match *f {
        Functional::Interior(a, b) => cexp(a.re * z[0] + b.re * z[1], a.im * z[0] + b.im * z[1]),
        Functional::Face1(b) => cexp(b.re * z[1], b.im * z[1]),
        Functional::Face2(a) => cexp(a.re * z[0], a.im * z[0]),
    }
}

/// Remaining mean local time on face `i` from `z`, as for a one-dimensional
/// reflected motion.
fn local_time_remainder(var: f64, mu: f64, z: f64) -> f64 {
    if mu <= 0.0 {
        f64::INFINITY
    } else {
        var / (2.0 * mu) * (-2.0 * mu * z / var).exp()
    }
}

fn truncation_bound(p: &ModelParams, f: &Functional, z: [f64; 2]) -> f64 {
    match *f {
        Functional::Interior(a, b) => {
            let rate = a.re * p.mu1 + b.re * p.mu2;
            (a.re * z[0] + b.re * z[1]).exp() / rate.abs()
        }
        Functional::Face1(b) => (b.re * z[1]).exp().min(1.0) * local_time_remainder(p.sigma11, p.mu1, z[0]),
        Functional::Face2(a) => (a.re * z[0]).exp().min(1.0) * local_time_remainder(p.sigma22, p.mu2, z[1]),
    }
}

fn check_functional(p: &ModelParams, f: &Functional) -> Result<()> {
    let k = branch_points(p)?;
    let dom = convergence_domain(p, &k)?;
    match *f {
        Functional::Interior(a, b) => {
            if a.re * p.mu1 + b.re * p.mu2 >= 0.0 {
                return Err(Error::Domain("Re θ·μ must be negative".into()));
            }
            if !dom.psi_contains(a.re, b.re) {
                return Err(Error::Domain(format!("Re θ = ({}, {}) outside the convergence box", a.re, b.re)));
            }
        }
        Functional::Face1(b) => {
            let ok = if dom.psi1_closed { b.re <= dom.psi1_max_re } else { b.re < dom.psi1_max_re };
            if !ok || b.re > 0.0 {
                return Err(Error::Domain(format!("Re θ2 = {} outside the convergence domain", b.re)));
            }
        }
        Functional::Face2(a) => {
            let ok = if dom.psi2_closed { a.re <= dom.psi2_max_re } else { a.re < dom.psi2_max_re };
            if !ok || a.re > 0.0 {
                return Err(Error::Domain(format!("Re θ1 = {} outside the convergence domain", a.re)));
            }
        }
    }
    Ok(())
}

fn check_transient(p: &ModelParams) -> Result<()> {
    let c = classify(p)?;
    if !c.exists {
        return Err(Error::ReflectionFailure);
    }
    if c.regime != Some(Regime::Transient) {
        return Err(Error::NotTransient);
    }
    Ok(())
}

/// Simulates one path and returns the raw functional values and the
/// truncation bounds at the horizon.
fn simulate_path(
    st: &Stepper,
    steps: usize,
    fs: &[Functional],
    rng: &mut ChaCha8Rng,
    acc: &mut [C64],
) -> Result<PathState> {
    let dt = st.dt;
    let mut s = PathState { z: [st.p.x1, st.p.x2], l: [0.0, 0.0] };
    let mut prev: Vec<C64> = fs.iter().map(|f| value_at(f, s.z)).collect();
    acc.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
    for _ in 0..steps {
        let (zn, dl) = st.step(rng, s.z)?;
        for (j, f) in fs.iter().enumerate() {
            match f {
                Functional::Interior(..) => {
                    let cur = value_at(f, zn);
                    acc[j] += 0.5 * dt * (prev[j] + cur);
                    prev[j] = cur;
                }
                Functional::Face1(_) if dl[0] > 0.0 => {
                    acc[j] += 0.5 * dl[0] * (value_at(f, s.z) + value_at(f, zn));
                }
                Functional::Face2(_) if dl[1] > 0.0 => {
                    acc[j] += 0.5 * dl[1] * (value_at(f, s.z) + value_at(f, zn));
                }
                _ => {}
            }
        }
        s.l[0] += dl[0];
        s.l[1] += dl[1];
        s.z = zn;
    }
    Ok(s)
}

/// Estimates several linear combinations of functionals from one set of paths.
pub fn estimate_combinations(p: &ModelParams, combos: &[Combination], cfg: &SimConfig) -> Result<Vec<McEstimate>> {
    check_transient(p)?;
    let mut fs: Vec<Functional> = Vec::new();
    for c in combos {
        for (_, f) in &c.terms {
            check_functional(p, f)?;
            if !fs.contains(f) {
                fs.push(*f);
            }
        }
    }
    let index = |f: &Functional| fs.iter().position(|g| g == f).expect("registered functional");
    let st = Stepper::new(p, cfg);
    let steps = cfg.steps();
    // Per combination: real part, imaginary part, truncation bound.
    let stats = run(cfg, 3 * combos.len(), |_, rng| {
        let mut acc = vec![C64::new(0.0, 0.0); fs.len()];
        let end = simulate_path(&st, steps, &fs, rng, &mut acc)?;
        let mut out = Vec::with_capacity(3 * combos.len());
        for c in combos {
            let mut v = c.constant;
            let mut bound = 0.0;
            for (coef, f) in &c.terms {
                let j = index(f);
                v += coef * acc[j];
                bound += coef.norm() * truncation_bound(p, f, end.z);
            }
            out.extend_from_slice(&[v.re, v.im, bound]);
        }
        Ok(out)
    })?;
    Ok((0..combos.len())
        .map(|i| {
            let sampling = ((stats.variance(3 * i) + stats.variance(3 * i + 1)) / stats.n).sqrt();
            let bias = stats.mean[3 * i + 2];
            McEstimate {
                mean: C64::new(stats.mean[3 * i], stats.mean[3 * i + 1]),
                stderr: sampling + bias,
                sampling_stderr: sampling,
                bias_bound: bias,
                paths: cfg.paths,
                config: *cfg,
            }
        })
        .collect())
}

/// `E∫ e^{θ·Z} dt`.
pub fn estimate_psi(p: &ModelParams, theta: (C64, C64), cfg: &SimConfig) -> Result<McEstimate> {
    Ok(estimate_combinations(p, &[Functional::Interior(theta.0, theta.1).into()], cfg)?[0])
}

/// `E∫ e^{θ·Z} dL_i` on face `i ∈ {1, 2}`; θ is the variable along the face.
pub fn estimate_psi_boundary(p: &ModelParams, face: usize, theta: C64, cfg: &SimConfig) -> Result<McEstimate> {
    let f = match face {
        1 => Functional::Face1(theta),
        2 => Functional::Face2(theta),
        _ => return Err(Error::Parameter(format!("face index {face} is not 1 or 2"))),
    };
    Ok(estimate_combinations(p, &[f.into()], cfg)?[0])
}

/// Rectangular grid of boxes `[x0, x1] × [y0, y1]` split `nx × ny`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGrid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl BoxGrid {
    fn index(&self, z: [f64; 2]) -> Option<usize> {
        let fx = (z[0] - self.x0) / (self.x1 - self.x0);
        let fy = (z[1] - self.y0) / (self.y1 - self.y0);
        if !(0.0..1.0).contains(&fx) || !(0.0..1.0).contains(&fy) {
            return None;
        }
        let i = ((fx * self.nx as f64) as usize).min(self.nx - 1);
        let j = ((fy * self.ny as f64) as usize).min(self.ny - 1);
        Some(i * self.ny + j)
    }
}

/// Mean occupation time of each box, indexed `[i][j]` with `i` along the
/// first coordinate.
pub fn occupation_histogram(p: &ModelParams, grid: &BoxGrid, cfg: &SimConfig) -> Result<Vec<Vec<McEstimate>>> {
    check_transient(p)?;
    if grid.nx == 0 || grid.ny == 0 || !(grid.x1 > grid.x0) || !(grid.y1 > grid.y0) {
        return Err(Error::Parameter("empty box grid".into()));
    }
    let st = Stepper::new(p, cfg);
    let steps = cfg.steps();
    let cells = grid.nx * grid.ny;
    let stats = run(cfg, cells, |_, rng| {
        let mut occ = vec![0.0; cells];
        let mut z = [p.x1, p.x2];
        for _ in 0..steps {
            if let Some(c) = grid.index(z) {
                occ[c] += cfg.dt;
            }
            z = st.step(rng, z)?.0;
        }
        Ok(occ)
    })?;
    Ok((0..grid.nx)
        .map(|i| {
            (0..grid.ny)
                .map(|j| {
                    let c = i * grid.ny + j;
                    let se = (stats.variance(c) / stats.n).sqrt();
                    McEstimate {
                        mean: C64::new(stats.mean[c], 0.0),
                        stderr: se,
                        sampling_stderr: se,
                        bias_bound: 0.0,
                        paths: cfg.paths,
                        config: *cfg,
                    }
                })
                .collect()
        })
        .collect())
}

/// Estimates from the one-dimensional simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Dim1Estimates {
    /// `E∫ e^{θX} dt`.
    pub psi: McEstimate,
    /// `E L(∞)`.
    pub local_time: McEstimate,
    /// Occupation density on equal bins of `[0, hist_max]`.
    pub density: Vec<McEstimate>,
    pub bin_edges: Vec<f64>,
}

/// Reflected Brownian motion on the half-line with variance `σ²` and drift `μ > 0`.
pub fn simulate_1d(q: &Dim1Params, theta: f64, hist_max: f64, bins: usize, cfg: &SimConfig) -> Result<Dim1Estimates> {
    q.check()?;
    if q.mu <= 0.0 {
        return Err(Error::NotTransient);
    }
    if !(theta < 0.0) {
        return Err(Error::Domain(format!("θ = {theta} must be negative")));
    }
    if bins == 0 || !(hist_max > 0.0) {
        return Err(Error::Parameter("empty histogram".into()));
    }
    let (dt, sqrt_dt) = (cfg.dt, cfg.dt.sqrt());
    let steps = cfg.steps();
    let width = hist_max / bins as f64;
    // Channels: ψ, its bound, L, its bound, then the bins.
    let stats = run(cfg, 4 + bins, |_, rng| {
        let mut out = vec![0.0; 4 + bins];
        let mut x = q.x0;
        let mut prev = (theta * x).exp();
        let mut l = 0.0;
        for _ in 0..steps {
            if x < hist_max {
                out[4 + ((x / width) as usize).min(bins - 1)] += dt / width;
            }
            let n: f64 = rng.sample(StandardNormal);
            let step = q.sigma2.sqrt() * sqrt_dt * n + q.mu * dt;
            let dl = match cfg.scheme {
                Scheme::Projected => (-(x + step)).max(0.0),
                Scheme::Bridge => {
                    let end = x + step;
                    if x > 0.0 && end > 0.0 && 2.0 * x * end > CROSSING_EXPONENT * q.sigma2 * dt {
                        0.0
                    } else {
                        (-(x + bridge_minimum(step, q.sigma2, dt, uniform_open(rng)))).max(0.0)
                    }
                }
            };
            x = (x + step + dl).max(0.0);
            l += dl;
            let cur = (theta * x).exp();
            out[0] += 0.5 * dt * (prev + cur);
            prev = cur;
        }
        out[1] = (theta * x).exp() / (theta * q.mu).abs();
        out[2] = l;
        out[3] = local_time_remainder(q.sigma2, q.mu, x);
        Ok(out)
    })?;
    let est = |c: usize, bias: f64| {
        let se = (stats.variance(c) / stats.n).sqrt();
        McEstimate {
            mean: C64::new(stats.mean[c], 0.0),
            stderr: se + bias,
            sampling_stderr: se,
            bias_bound: bias,
            paths: cfg.paths,
            config: *cfg,
        }
    };
    Ok(Dim1Estimates {
        psi: est(0, stats.mean[1]),
        local_time: est(2, stats.mean[3]),
        density: (0..bins).map(|b| est(4 + b, 0.0)).collect(),
        bin_edges: (0..=bins).map(|b| b as f64 * width).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small(paths: usize) -> SimConfig {
        SimConfig { dt: 1e-2, t_max: 10.0, paths, seed: 7, scheme: Scheme::Bridge }
    }

    #[test]
    fn projected_step_cases() {
        let p = ModelParams::canonical();
        let (z, dl) = reflect_step(&p, [0.5, 0.5], [0.1, -0.2], 0.0).unwrap();
        assert_eq!(dl, [0.0, 0.0]);
        assert_abs_diff_eq!(z[0], 0.6);
        let (z, dl) = reflect_step(&p, [0.0, 1.0], [-0.3, 0.5], 0.0).unwrap();
        assert_abs_diff_eq!(dl[0], 0.3);
        assert_eq!(dl[1], 0.0);
        assert_eq!(z, [0.0, 1.5]);
        let (z, dl) = reflect_step(&p, [0.0, 0.0], [-0.2, -0.2], 0.0).unwrap();
        assert_eq!(dl, [0.2, 0.2]);
        assert_eq!(z, [0.0, 0.0]);
    }

    #[test]
    fn oblique_corner_and_failure() {
        let p = ModelParams { r12: 0.5, r21: 0.5, ..ModelParams::canonical() };
        let dl = solve_lcp(&p, [-1.0, -1.0]).unwrap();
        assert_abs_diff_eq!(dl[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dl[1], 2.0 / 3.0, epsilon = 1e-15);
        let bad = ModelParams { r12: -2.0, r21: -1.0, ..ModelParams::canonical() };
        assert_eq!(solve_lcp(&bad, [-1.0, -1.0]), Err(Error::ReflectionFailure));
    }

    #[test]
    fn deterministic_for_a_seed() {
        let p = ModelParams::canonical();
        let t = (C64::new(-0.5, 0.0), C64::new(-0.5, 0.0));
        let a = estimate_psi(&p, t, &small(600)).unwrap();
        let b = estimate_psi(&p, t, &small(600)).unwrap();
        assert_eq!(a, b);
        let c = estimate_psi(&p, t, &SimConfig { seed: 8, ..small(600) }).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn rejects_growing_weights() {
        let p = ModelParams::canonical();
        let e = estimate_psi(&p, (C64::new(0.5, 0.0), C64::new(-0.1, 0.0)), &small(10));
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn histogram_is_additive() {
        let p = ModelParams::canonical();
        let cfg = small(300);
        let fine = occupation_histogram(&p, &BoxGrid { x0: 0.0, x1: 2.0, y0: 0.0, y1: 2.0, nx: 4, ny: 4 }, &cfg).unwrap();
        let coarse = occupation_histogram(&p, &BoxGrid { x0: 0.0, x1: 2.0, y0: 0.0, y1: 2.0, nx: 1, ny: 1 }, &cfg).unwrap();
        let total: f64 = fine.iter().flatten().map(|e| e.mean.re).sum();
        assert_abs_diff_eq!(total, coarse[0][0].mean.re, epsilon = 1e-12);
    }

    #[test]
    fn far_start_sees_no_boundary() {
        let p = ModelParams { x1: 50.0, ..ModelParams::canonical() };
        let e = estimate_psi_boundary(&p, 1, C64::new(0.0, 0.0), &small(200)).unwrap();
        assert_eq!(e.mean, C64::new(0.0, 0.0));
    }

    #[test]
    fn one_dimensional_local_time() {
        let q = Dim1Params { sigma2: 1.0, mu: 1.0, x0: 1.0 };
        let cfg = SimConfig { dt: 2e-3, t_max: 8.0, paths: 4000, seed: 3, scheme: Scheme::Bridge };
        let e = simulate_1d(&q, -1.0, 3.0, 10, &cfg).unwrap();
        let exact = 0.5 * (-2.0f64).exp();
        assert!((e.local_time.mean.re - exact).abs() < 4.0 * e.local_time.stderr);
    }
}
