//! Discrete profiles: `u(x)` in the original variables and `w(r)` on the ball.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Nodal values of `w(r)` on a radial grid. The boundary value `w(1)` is the mass `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(RadialProfile { grid, values })
    }

    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        RadialProfile { grid: grid.clone(), values }
    }

    pub fn constant(grid: &RadialGrid, value: f64) -> Self {
        Self::from_fn(grid, |_| value)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `w(1)`.
    pub fn mass(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `w - m`, which vanishes on the boundary.
    pub fn lift_removed(&self) -> RadialProfile {
        let m = self.mass();
        let mut values: Vec<f64> = self.values.iter().map(|v| v - m).collect();
        *values.last_mut().unwrap() = 0.0;
        RadialProfile { grid: self.grid.clone(), values }
    }

    /// `W + m` with the boundary value set to `m` exactly.
    pub fn with_lift(&self, m: f64) -> RadialProfile {
        let mut values: Vec<f64> = self.values.iter().map(|v| v + m).collect();
        *values.last_mut().unwrap() = m;
        RadialProfile { grid: self.grid.clone(), values }
    }

    /// Largest nodal distance to `other`.
    pub fn sup_distance(&self, other: &RadialProfile) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.values.iter().zip(&other.values).fold(0.0, |a, (x, y)| a.max((x - y).abs())))
    }
}

/// Nodal values of `u(x)` at `x_j = r_j^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassProfile {
    grid: RadialGrid,
    dim: u32,
    values: Vec<f64>,
    derivative_at_origin: f64,
}

impl MassProfile {
    /// `values[0]` must be exactly zero. The slope at the origin is extrapolated from the
    /// ratios `u_j / x_j` of the first three interior nodes (see [`origin_slope`]).
    pub fn new(grid: RadialGrid, dim: u32, values: Vec<f64>) -> Result<Self> {
        Self::check_shape(&grid, dim, &values)?;
        let slope = origin_slope(grid.nodes(), dim, &values);
        Ok(MassProfile { grid, dim, values, derivative_at_origin: slope })
    }

    pub fn with_origin_slope(
        grid: RadialGrid,
        dim: u32,
        values: Vec<f64>,
        derivative_at_origin: f64,
    ) -> Result<Self> {
        Self::check_shape(&grid, dim, &values)?;
        Ok(MassProfile { grid, dim, values, derivative_at_origin })
    }

    /// Samples `f` at `x_j`; `u_0` is set to zero.
    pub fn from_fn(grid: &RadialGrid, dim: u32, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = grid.x_nodes(dim).into_iter().map(&f).collect();
        values[0] = 0.0;
        Self::new(grid.clone(), dim, values)
    }

    fn check_shape(grid: &RadialGrid, dim: u32, values: &[f64]) -> Result<()> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if dim < 2 {
            return Err(Error::InvalidInput(format!("N = {dim} must be >= 2")));
        }
        if values[0] != 0.0 {
            return Err(Error::NotInYm(format!("u(0) = {} is not 0", values[0])));
        }
        Ok(())
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        self.grid.x_nodes(self.dim)
    }

    pub fn derivative_at_origin(&self) -> f64 {
        self.derivative_at_origin
    }

    /// `u(1)`.
    pub fn mass(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `c * u` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> MassProfile {
        MassProfile {
            grid: self.grid.clone(),
            dim: self.dim,
            values: self.values.iter().map(|v| c * v).collect(),
            derivative_at_origin: c * self.derivative_at_origin,
        }
    }
}

/// Slope at the origin from the ratios `u_j/x_j`, `j = 1, 2, 3`, extrapolated to `r = 0` by a
/// quadratic in `r^2` (the ratio is an even function of `r` for smooth radial data). Clamped at
/// zero since a nondecreasing `u` has a nonnegative slope.
pub fn origin_slope(r: &[f64], dim: u32, u: &[f64]) -> f64 {
    let n = dim as f64;
    let ratio = |j: usize| u[j] / libm::pow(r[j], n);
    let slope = match r.len() {
        0..=1 => 0.0,
        2 | 3 => ratio(1),
        _ => {
            let s: [f64; 3] = [r[1] * r[1], r[2] * r[2], r[3] * r[3]];
            let l1 = s[1] * s[2] / ((s[0] - s[1]) * (s[0] - s[2]));
            let l2 = s[0] * s[2] / ((s[1] - s[0]) * (s[1] - s[2]));
            let l3 = s[0] * s[1] / ((s[2] - s[0]) * (s[2] - s[1]));
            l1 * ratio(1) + l2 * ratio(2) + l3 * ratio(3)
        }
    };
    slope.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_slope_exact_for_affine_and_power() {
        let g = RadialGrid::uniform(10).unwrap();
        let u = MassProfile::from_fn(&g, 3, |x| 0.7 * x).unwrap();
        assert!((u.derivative_at_origin() - 0.7).abs() < 1e-14);
        // u = x^2, N = 2: ratio = r^2, extrapolates to 0
        let u = MassProfile::from_fn(&g, 2, |x| x * x).unwrap();
        assert!(u.derivative_at_origin().abs() < 1e-14);
        // u = x + x^(1+2/N): ratio = 1 + r^2
        let u = MassProfile::from_fn(&g, 4, |x| x + libm::pow(x, 1.5)).unwrap();
        assert!((u.derivative_at_origin() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_nonzero_origin_value() {
        let g = RadialGrid::uniform(4).unwrap();
        let err = MassProfile::new(g, 2, alloc::vec![0.1, 0.2, 0.3, 0.4, 0.5]).unwrap_err();
        assert!(matches!(err, Error::NotInYm(_)));
    }

    #[test]
    fn lift_round_trip() {
        let g = RadialGrid::uniform(8).unwrap();
        let w = RadialProfile::from_fn(&g, |r| 2.0 - r * r);
        let lifted = w.lift_removed().with_lift(1.0);
        assert_eq!(lifted.mass(), 1.0);
        assert!(w.sup_distance(&lifted).unwrap() < 1e-15);
    }
}
