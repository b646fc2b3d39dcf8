//! Bessel functions of the first kind `J_nu(x)` for `nu >= 0`, `x >= 0`, and their positive
//! zeros, without any special-function library.
//!
//! Ascending series below [`SERIES_LIMIT`], Hankel's asymptotic expansion above (it terminates
//! for half-integer order). Zeros are found by bisection on phase-shifted intervals of length
//! `π` around McMahon's leading term `(k + nu/2 - 1/4) π`.

use core::f64::consts::PI;

use alloc::format;
use alloc::vec::Vec;
use libm::{cos, pow, sin, sqrt, tgamma};

use crate::error::{Error, Result};

pub const SERIES_LIMIT: f64 = 14.0;

/// `sum_k (-x^2/4)^k / (k! Γ(nu + k + 1))`, equal to `(2/x)^nu J_nu(x)`.
fn reduced_series(nu: f64, x: f64) -> f64 {
    let z = -0.25 * x * x;
    let mut term = 1.0 / tgamma(nu + 1.0);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= z / (k * (nu + k));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > x {
            break;
        }
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    sum
}

fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term == 0.0 {
            break;
        }
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    sqrt(2.0 / (PI * x)) * (p * cos(chi) - q * sin(chi))
}

pub fn bessel_j(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x <= SERIES_LIMIT {
        pow(0.5 * x, nu) * reduced_series(nu, x)
    } else {
        hankel(nu, x)
    }
}

/// `x^(-nu) J_nu(x)`, finite at `x = 0` where it equals `1 / (2^nu Γ(nu+1))`.
pub fn scaled_bessel_j(nu: f64, x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        pow(0.5, nu) * reduced_series(nu, x)
    } else {
        hankel(nu, x) / pow(x, nu)
    }
}

/// The `k`-th positive zero (`k >= 1`) of `J_nu`.
pub fn bessel_zero(nu: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("zeros are numbered from 1".into()));
    }
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let (mut lo, mut hi) = ((beta - 0.5 * PI).max(1e-3), beta + 0.5 * PI);
    let (mut flo, fhi) = (bessel_j(nu, lo), bessel_j(nu, hi));
    if flo * fhi > 0.0 {
        return Err(Error::Internal(format!("no sign change bracketing zero {k} of J_{nu}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = bessel_j(nu, mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First `count` positive zeros of `J_nu`.
pub fn bessel_zeros(nu: f64, count: usize) -> Result<Vec<f64>> {
    let zeros: Vec<f64> = (1..=count).map(|k| bessel_zero(nu, k)).collect::<Result<_>>()?;
    if zeros.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Internal(format!("zeros of J_{nu} are not increasing")));
    }
    Ok(zeros)
}
