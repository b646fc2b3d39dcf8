//! The change of unknown `w(y) = u(|y|^N) / |y|^N` and its inverse.
//!
//! Time is rescaled as well: a transformed time `s` corresponds to the original time
//! `t = N^2 s`, so `u(t, x) = x w(t/N^2, x^(1/N))`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::functional::validate_ym;
use crate::grid::RadialGrid;
use crate::profile::{MassProfile, RadialProfile};
use crate::quad::gauss4;
use crate::stencil::{radial_gradient, radial_laplacian};

/// Original time for a transformed time.
pub fn native_time(transformed: f64, dim: u32) -> f64 {
    let n = dim as f64;
    n * n * transformed
}

pub fn transformed_time(native: f64, dim: u32) -> f64 {
    let n = dim as f64;
    native / (n * n)
}

fn ym_tolerance(u: &MassProfile) -> f64 {
    1e-12 * u.mass().abs().max(1.0)
}

/// `θ0`: `w_j = u_j / x_j`, `w_0 = u'(0)`.
pub fn theta0(u: &MassProfile) -> Result<RadialProfile> {
    let report = validate_ym(u, ym_tolerance(u));
    if let Some(why) = report.failure() {
        return Err(Error::NotInYm(why));
    }
    let x = u.x_nodes();
    let mut values = Vec::with_capacity(u.len());
    values.push(u.derivative_at_origin());
    values.extend(u.values()[1..].iter().zip(&x[1..]).map(|(v, x)| v / x));
    RadialProfile::new(u.grid().clone(), values)
}

/// `u_j = x_j w_j`; returns the profile and the original time `N^2 * t_transformed`.
pub fn theta0_inverse(w: &RadialProfile, dim: u32, t_transformed: f64) -> Result<(MassProfile, f64)> {
    let x = w.grid().x_nodes(dim);
    let mut values: Vec<f64> = w.values().iter().zip(&x).map(|(w, x)| w * x).collect();
    values[0] = 0.0;
    let u = MassProfile::with_origin_slope(w.grid().clone(), dim, values, w.values()[0])?;
    Ok((u, native_time(t_transformed, dim)))
}

/// `u_x(x_j) = w_j + r_j (w_r)_j / N`.
pub fn pullback_derivative(w: &RadialProfile, dim: u32) -> Vec<f64> {
    let r = w.grid().nodes();
    let wr = radial_gradient(r, w.values());
    let n = dim as f64;
    w.values().iter().zip(r).zip(&wr).map(|((w, r), g)| w + r * g / n).collect()
}

/// `x^(2-2/N) u_xx (x_j) = (x_j / N^2) Δw(r_j)` with the Laplacian in `N + 2` dimensions.
pub fn pullback_diffusion(w: &RadialProfile, dim: u32) -> Vec<f64> {
    let r = w.grid().nodes();
    let lap = radial_laplacian(r, dim + 2, w.values());
    let n2 = (dim * dim) as f64;
    let x = w.grid().x_nodes(dim);
    x.iter().zip(&lap).map(|(x, l)| x * l / n2).collect()
}

/// Piecewise-linear function through `(x_k, y_k)`, extended affinely beyond the end segments.
#[derive(Debug, Clone)]
struct Polyline {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Polyline {
    fn segment(&self, s: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(k) => k.min(n - 2),
            Err(k) => k.saturating_sub(1).min(n - 2),
        }
    }

    fn eval(&self, s: f64) -> f64 {
        let k = self.segment(s);
        let t = (s - self.x[k]) / (self.x[k + 1] - self.x[k]);
        self.y[k] + t * (self.y[k + 1] - self.y[k])
    }

    fn max_slope(&self) -> f64 {
        self.x
            .windows(2)
            .zip(self.y.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .fold(0.0, f64::max)
    }
}

// ∫_{-1}^{1} (1 - s^2)^3 ds = 32/35
const BUMP_NORM: f64 = 35.0 / 32.0;

fn bump(s: f64) -> f64 {
    let t = 1.0 - s * s;
    if t <= 0.0 {
        0.0
    } else {
        BUMP_NORM * t * t * t
    }
}

/// Smooth approximation in `Y_m` within `eta` of `u` that does not increase `N[u]`.
///
/// Interpolates `u` at `n0` equispaced knots (doubling `n0` until the interpolant is within
/// `eta/2`), extends the first and last segments affinely and convolves with the even bump
/// `(1 - s^2)^3` of half-width `min(eta / (2 Lip), 1/(2 n0))`. The convolution of a piecewise
/// linear function against a degree-6 kernel is integrated exactly by Gauss–Legendre panels
/// between kinks.
pub fn density_approximation(u: &MassProfile, eta: f64) -> Result<MassProfile> {
    if !(eta > 0.0) {
        return Err(Error::InvalidInput(format!("eta = {eta} must be > 0")));
    }
    let report = validate_ym(u, ym_tolerance(u));
    if let Some(why) = report.failure() {
        return Err(Error::NotInYm(why));
    }
    let xs = u.x_nodes();
    let data = Polyline { x: xs.clone(), y: u.values().to_vec() };
    let m = u.mass();

    let mut n0 = 2usize;
    let knots = loop {
        let kx: Vec<f64> = (0..=n0).map(|k| k as f64 / n0 as f64).collect();
        let ky: Vec<f64> = kx.iter().map(|&s| data.eval(s)).collect();
        let line = Polyline { x: kx, y: ky };
        let err = xs.iter().zip(u.values()).map(|(&s, &v)| (line.eval(s) - v).abs()).fold(0.0, f64::max);
        if err <= 0.5 * eta {
            break line;
        }
        if n0 >= 1 << 24 {
            return Err(Error::Internal("piecewise-affine interpolation did not converge".into()));
        }
        n0 *= 2;
    };

    let lip = knots.max_slope();
    let edge = 0.5 / n0 as f64;
    let alpha = if lip > 0.0 { (0.5 * eta / lip).min(edge) } else { edge };

    let smooth = |s: f64| -> f64 {
        if s <= edge || s >= 1.0 - edge {
            // the extension is affine on [s - alpha, s + alpha]
            return knots.eval(s);
        }
        // integrate bump((s - y)/alpha)/alpha * v(y) over y in [s - alpha, s + alpha]
        let (lo, hi) = (s - alpha, s + alpha);
        let mut cuts: Vec<f64> = Vec::with_capacity(4);
        cuts.push(lo);
        cuts.extend(knots.x.iter().copied().filter(|&k| k > lo && k < hi));
        cuts.push(hi);
        // normalizing by the discrete kernel mass keeps flat stretches flat to rounding
        let (mut num, mut mass) = (0.0, 0.0);
        for c in cuts.windows(2) {
            for &(y, wgt) in gauss4(c[0], c[1]).iter() {
                let k = wgt * bump((s - y) / alpha);
                num += k * knots.eval(y);
                mass += k;
            }
        }
        num / mass
    };

    let last = xs.len() - 1;
    let mut values: Vec<f64> = xs.iter().map(|&s| smooth(s)).collect();
    values[0] = 0.0;
    values[last] = m;
    let slope = knots.y[1] / knots.x[1];
    MassProfile::with_origin_slope(u.grid().clone(), u.dim(), values, slope)
}

/// `u` resampled on another grid by linear interpolation in `x`.
pub fn resample(u: &MassProfile, grid: &RadialGrid) -> Result<MassProfile> {
    let line = Polyline { x: u.x_nodes(), y: u.values().to_vec() };
    let mut values: Vec<f64> = grid.x_nodes(u.dim()).iter().map(|&s| line.eval(s)).collect();
    values[0] = 0.0;
    *values.last_mut().unwrap() = u.mass();
    MassProfile::with_origin_slope(grid.clone(), u.dim(), values, u.derivative_at_origin())
}
