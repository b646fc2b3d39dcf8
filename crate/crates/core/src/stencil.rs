//! Finite-difference stencils shared by every module.
//!
//! First and second derivatives use three-point Lagrange formulas on the (possibly non-uniform)
//! nodes: centred in the interior, one-sided at both ends. The radial Laplacian in `d` dimensions
//! is the finite-volume form `r^(1-d) (r^(d-1) w_r)_r` with faces at cell midpoints; at `r = 0`
//! it reduces to `2d (w_1 - w_0) / r_1^2`.

use alloc::vec;
use alloc::vec::Vec;

/// `f'` at every node.
pub fn first_derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 3 && f.len() == n, "need at least 3 nodes");
    let mut d = vec![0.0; n];
    {
        let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
        d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1]
            - h1 / (h2 * (h1 + h2)) * f[2];
    }
    for j in 1..n - 1 {
        let (h1, h2) = (x[j] - x[j - 1], x[j + 1] - x[j]);
        d[j] = -h2 / (h1 * (h1 + h2)) * f[j - 1]
            + (h2 - h1) / (h1 * h2) * f[j]
            + h1 / (h2 * (h1 + h2)) * f[j + 1];
    }
    {
        let (h1, h2) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
        d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2]
            + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
    }
    d
}

/// `f''` at every node; the end values are those of the interpolating parabola through the
/// three nearest nodes (first order).
pub fn second_derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 3 && f.len() == n, "need at least 3 nodes");
    let parabola = |j: usize| {
        let (h1, h2) = (x[j] - x[j - 1], x[j + 1] - x[j]);
        2.0 * (f[j - 1] / (h1 * (h1 + h2)) - f[j] / (h1 * h2) + f[j + 1] / (h2 * (h1 + h2)))
    };
    let mut d = vec![0.0; n];
    for j in 1..n - 1 {
        d[j] = parabola(j);
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    d
}

/// Radial derivative `w_r` of a radial function; zero at the centre by symmetry.
pub fn radial_gradient(r: &[f64], w: &[f64]) -> Vec<f64> {
    let mut d = first_derivative(r, w);
    d[0] = 0.0;
    d
}

/// Rows `0..M-1` of the radial Laplacian acting on the nodes `0..=M`, as
/// `(lower, diag, upper)` with `lower[0] = 0`. Row `M-1` couples to the boundary node `M`
/// through `upper[M-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianRows {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

pub fn laplacian_rows(r: &[f64], d: u32) -> LaplacianRows {
    let n = r.len();
    assert!(n >= 3);
    let dd = d as f64;
    let face = |j: usize| 0.5 * (r[j] + r[j + 1]);
    let area = |s: f64| libm::pow(s, dd - 1.0);
    let rows = n - 1;
    let mut lower = vec![0.0; rows];
    let mut diag = vec![0.0; rows];
    let mut upper = vec![0.0; rows];

    let r_half = face(0);
    let c0 = dd * area(r_half) / ((r[1] - r[0]) * libm::pow(r_half, dd));
    diag[0] = -c0;
    upper[0] = c0;
    for j in 1..rows {
        let (fm, fp) = (face(j - 1), face(j));
        let vol = (libm::pow(fp, dd) - libm::pow(fm, dd)) / dd;
        let cm = area(fm) / ((r[j] - r[j - 1]) * vol);
        let cp = area(fp) / ((r[j + 1] - r[j]) * vol);
        lower[j] = cm;
        diag[j] = -(cm + cp);
        upper[j] = cp;
    }
    LaplacianRows { lower, diag, upper }
}

/// `Δw` at every node. Rows `0..M-1` use [`laplacian_rows`]; the boundary value uses one-sided
/// derivatives `w_rr + (d-1) w_r` at `r = 1`.
pub fn radial_laplacian(r: &[f64], d: u32, w: &[f64]) -> Vec<f64> {
    let rows = laplacian_rows(r, d);
    let n = r.len();
    let mut out = vec![0.0; n];
    for j in 0..n - 1 {
        let left = if j > 0 { rows.lower[j] * w[j - 1] } else { 0.0 };
        out[j] = left + rows.diag[j] * w[j] + rows.upper[j] * w[j + 1];
    }
    let wr = first_derivative(r, w);
    let wrr = second_derivative(r, w);
    out[n - 1] = wrr[n - 1] + (d as f64 - 1.0) / r[n - 1] * wr[n - 1];
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, p: f64) -> Vec<f64> {
        (0..=n).map(|j| libm::pow(j as f64 / n as f64, p)).collect()
    }

    #[test]
    fn derivatives_exact_on_quadratics() {
        for &p in &[1.0, 2.0, 3.0] {
            let x = grid(9, p);
            let f: Vec<f64> = x.iter().map(|&s| 3.0 - 2.0 * s + 5.0 * s * s).collect();
            let d = first_derivative(&x, &f);
            let dd = second_derivative(&x, &f);
            for j in 0..x.len() {
                assert!((d[j] - (-2.0 + 10.0 * x[j])).abs() < 1e-9, "p={p} j={j}");
                assert!((dd[j] - 10.0).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn laplacian_exact_on_r_squared() {
        for d in [3u32, 4, 5, 6] {
            let r = grid(16, 1.0);
            let w: Vec<f64> = r.iter().map(|&s| s * s).collect();
            let lap = radial_laplacian(&r, d, &w);
            for (j, v) in lap.iter().enumerate() {
                assert!((v - 2.0 * d as f64).abs() < 1e-10, "d={d} j={j}: {v}");
            }
        }
    }

    #[test]
    fn laplacian_annihilates_constants_and_is_m_matrix() {
        let r = grid(20, 1.5);
        let rows = laplacian_rows(&r, 5);
        for j in 0..rows.diag.len() {
            let s = rows.lower[j] + rows.diag[j] + rows.upper[j];
            assert!(s.abs() < 1e-9 * rows.diag[j].abs());
            assert!(rows.lower[j] >= 0.0 && rows.upper[j] > 0.0 && rows.diag[j] < 0.0);
        }
    }

    #[test]
    fn laplacian_second_order_on_smooth_radial_function() {
        // w = exp(-r^2): Δw = (4 r^2 - 2 d) exp(-r^2)
        let d = 4u32;
        let mut errs = Vec::new();
        for n in [32usize, 64, 128] {
            let r = grid(n, 1.0);
            let w: Vec<f64> = r.iter().map(|&s| libm::exp(-s * s)).collect();
            let lap = radial_laplacian(&r, d, &w);
            let err = r
                .iter()
                .zip(&lap)
                .take(n)
                .map(|(&s, &l)| (l - (4.0 * s * s - 2.0 * d as f64) * libm::exp(-s * s)).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
    }
}
