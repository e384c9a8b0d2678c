//! Small numerical building blocks: Gauss–Legendre rules, barycentric
//! interpolation, pairwise summation and `(eᶻ−1)/z`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        // Newton leaves the node list descending; store it ascending.
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Barycentric weights `1/∏_{k≠j}(x_j − x_k)`.
pub fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let prod: f64 = (0..x.len()).filter(|&k| k != j).map(|k| x[j] - x[k]).product();
            1.0 / prod
        })
        .collect()
}

/// Evaluates the interpolant through `(x_j, f_j)` at `t`.
pub fn barycentric_eval<T>(x: &[f64], lambda: &[f64], f: &[T], t: f64) -> T
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Div<f64, Output = T>,
{
    if let Some(j) = x.iter().position(|&xj| xj == t) {
        return f[j];
    }
    let mut num = f[0] * 0.0;
    let mut den = 0.0;
    for j in 0..x.len() {
        let c = lambda[j] / (t - x[j]);
        num = num + f[j] * c;
        den += c;
    }
    num / den
}

/// Dense differentiation matrix of the interpolant, row-major.
pub fn differentiation_matrix(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let lambda = barycentric_weights(x);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = lambda[j] / lambda[i] / (x[i] - x[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

/// Recursive pairwise summation; the result does not depend on how the
/// caller scheduled the work that produced `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        values.iter().sum()
    } else {
        let (a, b) = values.split_at(values.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

pub fn pairwise_sum_c(values: &[C64]) -> C64 {
    if values.len() <= 16 {
        values.iter().sum()
    } else {
        let (a, b) = values.split_at(values.len() / 2);
        pairwise_sum_c(a) + pairwise_sum_c(b)
    }
}

/// `(eᶻ − 1)/z`, accurate near zero.
pub fn exprel(z: C64) -> C64 {
    if z.norm() < 0.5 {
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..30 {
            term *= z / k as f64;
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [1, 2, 5, 8, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            let deg = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
            assert_abs_diff_eq!(q, 2.0 / (deg as f64 + 1.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn interpolation_and_derivative() {
        let (x, _) = gauss_legendre(12);
        let lam = barycentric_weights(&x);
        let f: Vec<f64> = x.iter().map(|t| (1.3 * t).sin()).collect();
        assert_abs_diff_eq!(barycentric_eval(&x, &lam, &f, 0.123), (1.3f64 * 0.123).sin(), epsilon = 1e-11);
        assert_abs_diff_eq!(barycentric_eval(&x, &lam, &f, 1.0), (1.3f64).sin(), epsilon = 1e-10);
        let d = differentiation_matrix(&x);
        for i in 0..x.len() {
            let df: f64 = (0..x.len()).map(|j| d[i * x.len() + j] * f[j]).sum();
            assert_abs_diff_eq!(df, 1.3 * (1.3 * x[i]).cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn pairwise_matches_naive_sum() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        assert_abs_diff_eq!(pairwise_sum(&v), v.iter().sum::<f64>(), epsilon = 1e-12);
    }

    #[test]
    fn exprel_branches_agree() {
        for &z in &[C64::new(0.49, 0.0), C64::new(-0.3, 0.35), C64::new(1e-9, 0.0)] {
            let direct = if z.norm() > 1e-6 { (z.exp() - 1.0) / z } else { 1.0 + z / 2.0 };
            assert_abs_diff_eq!((exprel(z) - direct).norm(), 0.0, epsilon = 1e-13);
        }
        assert_eq!(exprel(C64::new(0.0, 0.0)), C64::new(1.0, 0.0));
    }
}
