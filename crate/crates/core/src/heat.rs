//! Dirichlet heat propagator for radial functions on the unit ball of `R^d`, `d = N + 2`.
//!
//! Two backends: backward Euler on the finite-volume radial Laplacian
//! ([`RadialHeatOperator`]) and a truncated Bessel eigen-expansion ([`EigenBasis`]) that is
//! exact in time and serves as an oracle.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bessel::{bessel_j, bessel_zeros, scaled_bessel_j};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::profile::RadialProfile;
use crate::quad::{gauss4, integrate_gauss};
use crate::stencil::{laplacian_rows, radial_gradient, LaplacianRows};
use crate::tridiag;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialHeatOperator {
    ball_dim: u32,
    grid: RadialGrid,
    rows: LaplacianRows,
}

impl RadialHeatOperator {
    pub fn new(grid: &RadialGrid, ball_dim: u32) -> Self {
        RadialHeatOperator { ball_dim, grid: grid.clone(), rows: laplacian_rows(grid.nodes(), ball_dim) }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn ball_dim(&self) -> u32 {
        self.ball_dim
    }

    pub fn rows(&self) -> &LaplacianRows {
        &self.rows
    }

    /// Tridiagonal `(lower, diag, upper)` of `I - dt L` on the unknown nodes `0..M-1`.
    pub fn implicit_matrix(&self, dt: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let lower = self.rows.lower.iter().map(|c| -dt * c).collect();
        let diag = self.rows.diag.iter().map(|c| 1.0 - dt * c).collect();
        let upper = self.rows.upper.iter().map(|c| -dt * c).collect();
        (lower, diag, upper)
    }

    /// Nonpositive off-diagonals and strict diagonal dominance of `I - dt L`.
    pub fn is_m_matrix(&self, dt: f64) -> bool {
        let (lower, diag, upper) = self.implicit_matrix(dt);
        (0..diag.len()).all(|j| {
            let l = if j > 0 { lower[j] } else { 0.0 };
            let u = if j + 1 < diag.len() { upper[j] } else { 0.0 };
            l <= 0.0 && upper[j] <= 0.0 && diag[j] > 0.0 && diag[j] > l.abs() + u.abs()
        })
    }

    /// Solves `(I - dt L) x = rhs` on nodes `0..M-1` with a homogeneous boundary value.
    pub fn solve_implicit(&self, dt: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.rows.diag.len() {
            return Err(Error::InvalidInput("right-hand side has the wrong length".into()));
        }
        let (lower, diag, mut upper) = self.implicit_matrix(dt);
        *upper.last_mut().unwrap() = 0.0;
        tridiag::solve(&lower, &diag, &upper, rhs)
    }

    /// One backward-Euler step for `W` with `W(1) = 0`.
    pub fn heat_step(&self, w: &RadialProfile, dt: f64) -> Result<RadialProfile> {
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!("dt = {dt} must be > 0")));
        }
        if w.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if w.mass() != 0.0 {
            return Err(Error::InvalidInput("heat_step acts on profiles vanishing at r = 1".into()));
        }
        let interior = &w.values()[..w.values().len() - 1];
        let mut next = self.solve_implicit(dt, interior)?;
        next.push(0.0);
        RadialProfile::new(self.grid.clone(), next)
    }

    /// `n` backward-Euler steps of size `t/n`.
    pub fn propagate(&self, w: &RadialProfile, t: f64, n: usize) -> Result<RadialProfile> {
        if t == 0.0 || n == 0 {
            return Ok(w.clone());
        }
        let dt = t / n as f64;
        let mut cur = w.clone();
        for _ in 0..n {
            cur = self.heat_step(&cur, dt)?;
        }
        Ok(cur)
    }
}

/// Radial Dirichlet eigenpairs of `-Δ` in `d` dimensions:
/// `φ_k(r) = c_k r^(1-d/2) J_ν(j_k r)`, `ν = d/2 - 1`, `λ_k = j_k^2`, normalized in
/// `L^2(r^(d-1) dr)` with `c_k = sqrt(2) / |J_(ν+1)(j_k)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    ball_dim: u32,
    order: f64,
    grid: RadialGrid,
    zeros: Vec<f64>,
    norms: Vec<f64>,
    /// `φ_k(r_j)`
    nodal: Vec<Vec<f64>>,
    /// `∫ φ_k(r) hat_j(r) r^(d-1) dr` with `hat_j` the piecewise-linear nodal basis.
    projection: Vec<Vec<f64>>,
}

impl EigenBasis {
    pub fn new(grid: &RadialGrid, ball_dim: u32, count: usize) -> Result<Self> {
        if ball_dim < 2 {
            return Err(Error::InvalidInput("ball dimension must be >= 2".into()));
        }
        if count == 0 {
            return Err(Error::InvalidInput("need at least one eigenpair".into()));
        }
        let order = 0.5 * ball_dim as f64 - 1.0;
        let zeros = bessel_zeros(order, count)?;
        let norms: Vec<f64> =
            zeros.iter().map(|&j| libm::sqrt(2.0) / bessel_j(order + 1.0, j).abs()).collect();
        let mut basis = EigenBasis {
            ball_dim,
            order,
            grid: grid.clone(),
            zeros,
            norms,
            nodal: Vec::new(),
            projection: Vec::new(),
        };
        let r = grid.nodes();
        let weight = |s: f64| libm::pow(s, ball_dim as f64 - 1.0);
        for k in 0..count {
            basis.nodal.push(r.iter().map(|&s| basis.eval(k, s)).collect());
            let mut row = vec![0.0; r.len()];
            for j in 0..r.len() - 1 {
                let (a, b) = (r[j], r[j + 1]);
                for &(s, w) in gauss4(a, b).iter() {
                    let t = (s - a) / (b - a);
                    let f = w * basis.eval(k, s) * weight(s);
                    row[j] += f * (1.0 - t);
                    row[j + 1] += f * t;
                }
            }
            basis.projection.push(row);
        }
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn ball_dim(&self) -> u32 {
        self.ball_dim
    }

    /// `λ_k` (0-based `k`).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.zeros[k] * self.zeros[k]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.eigenvalue(k)).collect()
    }

    /// `φ_k(r)`.
    pub fn eval(&self, k: usize, r: f64) -> f64 {
        let j = self.zeros[k];
        self.norms[k] * libm::pow(j, self.order) * scaled_bessel_j(self.order, j * r)
    }

    pub fn nodal_values(&self, k: usize) -> &[f64] {
        &self.nodal[k]
    }

    /// `∫_0^1 φ_a φ_b r^(d-1) dr` by composite Gauss–Legendre, independent of the grid.
    pub fn inner_product(&self, a: usize, b: usize, panels: usize) -> f64 {
        let d = self.ball_dim as f64;
        integrate_gauss(|r| self.eval(a, r) * self.eval(b, r) * libm::pow(r, d - 1.0), 0.0, 1.0, panels)
    }

    /// Coefficients `⟨W, φ_k⟩` of the piecewise-linear interpolant of `W`, `k < count`.
    pub fn project(&self, w: &[f64], count: usize) -> Vec<f64> {
        self.projection[..count]
            .iter()
            .map(|row| row.iter().zip(w).map(|(p, v)| p * v).sum())
            .collect()
    }

    /// `sum_k c_k φ_k(r_j)`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for (c, phi) in coeffs.iter().zip(&self.nodal) {
            for (o, p) in out.iter_mut().zip(phi) {
                *o += c * p;
            }
        }
        *out.last_mut().unwrap() = 0.0;
        out
    }

    /// `sum_{k<K} exp(-λ_k t) ⟨W, φ_k⟩ φ_k`.
    pub fn eigen_propagate(&self, w: &RadialProfile, t: f64, count: usize) -> Result<RadialProfile> {
        if count > self.len() || count == 0 {
            return Err(Error::InvalidInput(format!(
                "requested {count} modes, basis holds {}",
                self.len()
            )));
        }
        if w.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("t = {t} must be >= 0")));
        }
        let mut c = self.project(w.values(), count);
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= libm::exp(-self.eigenvalue(k) * t);
        }
        RadialProfile::new(self.grid.clone(), self.synthesize(&c))
    }
}

/// Measured stand-in for the smoothing constant of the heat semigroup: the largest of
/// `‖S(t)W‖∞ / ‖W‖∞` and `√t ‖∇S(t)W‖∞ / ‖W‖∞` over the samples and times.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmoothingMeasurement {
    pub sup_ratio: f64,
    pub gradient_ratio: f64,
}

impl SmoothingMeasurement {
    /// `C_D >= 1` as used in the contraction estimates.
    pub fn constant(&self) -> f64 {
        self.sup_ratio.max(self.gradient_ratio).max(1.0)
    }
}

/// Runs backward Euler through the increasing `times` (each interval split in `substeps`) for
/// every sample and records the two ratios.
pub fn measure_smoothing(
    op: &RadialHeatOperator,
    samples: &[RadialProfile],
    times: &[f64],
    substeps: usize,
) -> Result<SmoothingMeasurement> {
    let mut sup_ratio: f64 = 0.0;
    let mut gradient_ratio: f64 = 0.0;
    let r = op.grid().nodes();
    for w in samples {
        let norm = w.sup_norm();
        if norm == 0.0 {
            continue;
        }
        let mut cur = w.clone();
        let mut t0 = 0.0;
        for &t in times {
            cur = op.propagate(&cur, t - t0, substeps)?;
            t0 = t;
            sup_ratio = sup_ratio.max(cur.sup_norm() / norm);
            let g = radial_gradient(r, cur.values()).iter().fold(0.0, |a: f64, v| a.max(v.abs()));
            gradient_ratio = gradient_ratio.max(libm::sqrt(t) * g / norm);
        }
    }
    Ok(SmoothingMeasurement { sup_ratio, gradient_ratio })
}
