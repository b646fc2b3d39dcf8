//! Scalar functionals on mass profiles and `Y_m` membership.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::MassProfile;
use crate::stencil::first_derivative;

/// Cap on `u_1/x_1` used as the discrete stand-in for "`u'(0)` exists". Heuristic.
pub const DEFAULT_SLOPE_CAP: f64 = 1e6;

/// `N[u] = sup_{x in (0,1]} u(x)/x` on the grid. The slope at the origin is the limit of the
/// ratio as `x -> 0` and is included in the supremum.
pub fn slope_functional(u: &MassProfile) -> Result<f64> {
    if u.len() < 2 {
        return Err(Error::InvalidInput("slope functional needs at least 2 nodes".into()));
    }
    let x = u.x_nodes();
    let sup = u.values()[1..]
        .iter()
        .zip(&x[1..])
        .map(|(v, x)| v / x)
        .fold(u.derivative_at_origin(), f64::max);
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YmReport {
    pub origin_zero: bool,
    /// `u_M`, the mass the profile carries.
    pub boundary_value: f64,
    /// First index with `u_j < -tol`.
    pub negative_at: Option<usize>,
    /// First index with `u_j < u_{j-1} - tol`.
    pub decreasing_at: Option<usize>,
    /// `u_1 / x_1`.
    pub origin_ratio: f64,
    pub slope_cap: f64,
    /// The finite-slope test is a heuristic surrogate, always flagged as such.
    pub slope_check_heuristic: bool,
}

impl YmReport {
    pub fn finite_slope(&self) -> bool {
        self.origin_ratio.is_finite() && self.origin_ratio <= self.slope_cap
    }

    pub fn monotone(&self) -> bool {
        self.decreasing_at.is_none()
    }

    pub fn passed(&self) -> bool {
        self.origin_zero && self.negative_at.is_none() && self.monotone() && self.finite_slope()
    }

    /// Name of the first failed invariant.
    pub fn failure(&self) -> Option<alloc::string::String> {
        if !self.origin_zero {
            Some("u(0) != 0".into())
        } else if let Some(j) = self.negative_at {
            Some(format!("negative value at node {j}"))
        } else if let Some(j) = self.decreasing_at {
            Some(format!("not nondecreasing at node {j}"))
        } else if !self.finite_slope() {
            Some(format!("origin slope u_1/x_1 = {} exceeds cap {}", self.origin_ratio, self.slope_cap))
        } else {
            None
        }
    }
}

pub fn validate_ym(u: &MassProfile, tol: f64) -> YmReport {
    validate_ym_with_cap(u, tol, DEFAULT_SLOPE_CAP)
}

pub fn validate_ym_with_cap(u: &MassProfile, tol: f64, slope_cap: f64) -> YmReport {
    let v = u.values();
    let x = u.x_nodes();
    YmReport {
        origin_zero: v[0] == 0.0,
        boundary_value: u.mass(),
        negative_at: v.iter().position(|&a| a < -tol),
        decreasing_at: v.windows(2).position(|w| w[1] < w[0] - tol).map(|j| j + 1),
        origin_ratio: if v.len() > 1 { v[1] / x[1] } else { f64::NAN },
        slope_cap,
        slope_check_heuristic: true,
    }
}

/// `u_1/x_1` along a sequence of refined profiles.
pub fn origin_ratio_trend(profiles: &[MassProfile]) -> Vec<f64> {
    profiles.iter().map(|u| u.values()[1] / u.x_nodes()[1]).collect()
}

/// The trend grows by at least `factor` at every refinement.
pub fn ratio_diverges(trend: &[f64], factor: f64) -> bool {
    trend.len() >= 2 && trend.windows(2).all(|w| w[1] > factor * w[0])
}

/// `max_{j>=1} |u'_j - u'_0| / x_j^gamma` with three-point derivatives in `x`.
pub fn holder_seminorm_at_origin(u: &MassProfile, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidInput(format!("Hölder exponent {gamma} must be > 0")));
    }
    if u.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 nodes".into()));
    }
    let x = u.x_nodes();
    let du = first_derivative(&x, u.values());
    Ok(du[1..]
        .iter()
        .zip(&x[1..])
        .map(|(d, x)| (d - du[0]).abs() / libm::pow(*x, gamma))
        .fold(0.0, f64::max))
}
