//! Mild solutions of the regularized transformed problem as fixed points of the Duhamel map
//! `Φ(W)(t) = S(t) W0 + ∫_0^t S(t-s) F_eps(W(s)) ds`, with `W = w - m`.
//!
//! `S` is realized by the Bessel eigen-expansion, so the smoothing kernel is exact in `t - s`;
//! the source is frozen on each mesh interval, which gives the exponential-Euler weights
//! `(1 - exp(-λΔ)) / λ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heat::EigenBasis;
use crate::params::ProblemParams;
use crate::profile::RadialProfile;
use crate::quad::singular_beta_integral;
use crate::stencil::radial_gradient;

/// `F_eps(W) = N^2 (m + W) f_eps(m + W + r W_r / N)` node by node, with `W_r = 0` at the centre.
#[allow(non_snake_case)]
pub fn F_eps_apply(w: &RadialProfile, params: &ProblemParams) -> RadialProfile {
    let n = params.n();
    let m = params.mass;
    let f = params.reaction();
    let r = w.grid().nodes();
    let g = radial_gradient(r, w.values());
    let values = w
        .values()
        .iter()
        .zip(r)
        .zip(&g)
        .map(|((&w, &r), &g)| n * n * (m + w) * f.value(m + w + r * g / n))
        .collect();
    RadialProfile::new(w.grid().clone(), values).expect("same grid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuhamelOptions {
    /// Number of eigenmodes kept.
    pub modes: usize,
    /// Uniform time steps on `[0, τ]`.
    pub steps: usize,
    pub max_iter: usize,
    /// Stop once successive iterates are this close in the E-norm.
    pub tol: f64,
}

impl Default for DuhamelOptions {
    fn default() -> Self {
        DuhamelOptions { modes: 40, steps: 100, max_iter: 60, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuhamelIterate {
    pub times: Vec<f64>,
    /// `W(t_p)`, vanishing at `r = 1`.
    pub profiles: Vec<RadialProfile>,
    pub e_norm: f64,
    /// `d_k / d_(k-1)` for successive E-norm distances `d_k`.
    pub contraction_ratios: Vec<f64>,
    pub iterations: usize,
}

impl DuhamelIterate {
    /// `w = m + W` at every mesh time.
    pub fn lifted(&self, m: f64) -> Vec<RadialProfile> {
        self.profiles.iter().map(|p| p.with_lift(m)).collect()
    }

    pub fn max_contraction_ratio(&self) -> f64 {
        self.contraction_ratios.iter().copied().fold(0.0, f64::max)
    }
}

fn c1_norm(w: &RadialProfile) -> f64 {
    let g = radial_gradient(w.grid().nodes(), w.values());
    w.sup_norm() + g.iter().fold(0.0, |a: f64, v| a.max(v.abs()))
}

/// `max(sup_p ‖W(t_p)‖∞, sup_(p>=1) √t_p ‖W(t_p)‖_C1)`; the weighted part skips `t_0 = 0`.
pub fn e_norm(times: &[f64], profiles: &[RadialProfile]) -> f64 {
    let sup = profiles.iter().map(RadialProfile::sup_norm).fold(0.0, f64::max);
    let weighted = times
        .iter()
        .zip(profiles)
        .skip(1)
        .map(|(t, w)| libm::sqrt(*t) * c1_norm(w))
        .fold(0.0, f64::max);
    sup.max(weighted)
}

fn e_distance(times: &[f64], a: &[RadialProfile], b: &[RadialProfile]) -> f64 {
    let diff: Vec<RadialProfile> = a
        .iter()
        .zip(b)
        .map(|(a, b)| {
            let v = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
            RadialProfile::new(a.grid().clone(), v).expect("same grid")
        })
        .collect();
    e_norm(times, &diff)
}

/// Picard iteration for the Duhamel map on `[0, τ]`, starting from `S(t) W0`.
pub fn duhamel_fixed_point(
    basis: &EigenBasis,
    w0: &RadialProfile,
    params: &ProblemParams,
    tau: f64,
    opts: &DuhamelOptions,
) -> Result<DuhamelIterate> {
    if params.epsilon.is_limit() {
        return Err(Error::InvalidInput("the Duhamel construction needs eps > 0".into()));
    }
    if !(tau > 0.0) || opts.steps == 0 || opts.modes == 0 || opts.modes > basis.len() {
        return Err(Error::InvalidInput(format!(
            "need tau > 0, steps > 0 and 0 < modes <= {}",
            basis.len()
        )));
    }
    if w0.grid() != basis.grid() {
        return Err(Error::GridMismatch);
    }
    if w0.mass() != 0.0 {
        return Err(Error::InvalidInput("W0 must vanish at r = 1".into()));
    }
    let k = opts.modes;
    let dt = tau / opts.steps as f64;
    let times: Vec<f64> = (0..=opts.steps).map(|p| p as f64 * dt).collect();
    let lambda: Vec<f64> = (0..k).map(|i| basis.eigenvalue(i)).collect();
    let decay: Vec<f64> = lambda.iter().map(|l| libm::exp(-l * dt)).collect();
    let weight: Vec<f64> = lambda.iter().map(|l| -libm::expm1(-l * dt) / l).collect();
    let a0 = basis.project(w0.values(), k);
    let grid = basis.grid().clone();

    let homogeneous: Vec<Vec<f64>> = {
        let mut a = a0.clone();
        let mut out = vec![a.clone()];
        for _ in 0..opts.steps {
            for (ai, e) in a.iter_mut().zip(&decay) {
                *ai *= e;
            }
            out.push(a.clone());
        }
        out
    };
    let synth = |a: &[f64]| RadialProfile::new(grid.clone(), basis.synthesize(a)).expect("grid");
    let mut current: Vec<RadialProfile> = homogeneous.iter().map(|a| synth(a)).collect();
    // t_0 carries W0 itself rather than its truncated expansion
    current[0] = w0.clone();

    let mut ratios = Vec::new();
    let mut last_distance = f64::NAN;
    let mut streak = 0;
    for iter in 1..=opts.max_iter {
        let mut next = Vec::with_capacity(times.len());
        next.push(w0.clone());
        let mut a = a0.clone();
        for p in 0..opts.steps {
            let f = basis.project(F_eps_apply(&current[p], params).values(), k);
            for i in 0..k {
                a[i] = decay[i] * a[i] + weight[i] * f[i];
            }
            next.push(synth(&a));
        }
        let distance = e_distance(&times, &next, &current);
        if !distance.is_finite() {
            return Err(Error::Diverged { ratio: f64::INFINITY, iterations: iter });
        }
        current = next;
        if last_distance.is_finite() && last_distance > 0.0 {
            let ratio = distance / last_distance;
            ratios.push(ratio);
            streak = if ratio >= 1.0 { streak + 1 } else { 0 };
            if streak >= 3 {
                return Err(Error::Diverged { ratio, iterations: iter });
            }
        }
        if distance <= opts.tol {
            let e = e_norm(&times, &current);
            return Ok(DuhamelIterate {
                times,
                profiles: current,
                e_norm: e,
                contraction_ratios: ratios,
                iterations: iter,
            });
        }
        last_distance = distance;
    }
    Err(Error::Diverged {
        ratio: ratios.last().copied().unwrap_or(f64::NAN),
        iterations: opts.max_iter,
    })
}

fn lipschitz_eps(params: &ProblemParams) -> Result<f64> {
    match params.reaction() {
        crate::params::Reaction::Regularized(f) => Ok(f.lipschitz()),
        crate::params::Reaction::Power { .. } => {
            Err(Error::InvalidInput("contraction constants need eps > 0".into()))
        }
    }
}

/// Contraction constants `(β2, β3)` of the Duhamel map on the ball of radius `K` in `E`, for a
/// smoothing constant `c_d` of the heat semigroup.
pub fn beta_constants(params: &ProblemParams, c_d: f64, k: f64, tau: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0 && k >= 0.0 && c_d > 0.0) {
        return Err(Error::InvalidInput(format!("need tau > 0, K >= 0, C_D > 0 (tau={tau}, K={k}, C_D={c_d})")));
    }
    let q = params.q();
    let n2 = params.n() * params.n();
    let m = params.mass;
    let l = lipschitz_eps(params)?;
    let st = libm::sqrt(tau);
    let power = libm::pow(tau, 1.0 - 0.5 * q) * libm::pow(m * st + k, q);
    let b2 = c_d * n2 * (power / (1.0 - 0.5 * q) + 2.0 * st * (m + k) * l);
    let b3 = c_d
        * n2
        * (power * singular_beta_integral(0.5, 0.5 * q)?
            + st * (m + k) * l * singular_beta_integral(0.5, 0.5)?);
    Ok((b2, b3))
}

/// Bound on `‖Φ(W) - S(·)W0‖_E` over the ball of radius `K`, from `|F_eps(W)(s)| <=
/// N^2 (m + K) (m √s + K)^q s^(-q/2)`.
pub fn invariance_bound(params: &ProblemParams, c_d: f64, k: f64, tau: f64) -> Result<f64> {
    let q = params.q();
    let n2 = params.n() * params.n();
    let m = params.mass;
    let base = c_d * n2 * (m + k) * libm::pow(m * libm::sqrt(tau) + k, q) * libm::pow(tau, 1.0 - 0.5 * q);
    Ok(base * (1.0 / (1.0 - 0.5 * q)).max(singular_beta_integral(0.5, 0.5 * q)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauChoice {
    pub tau: f64,
    pub k: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub invariance: f64,
}

/// Largest `τ <= tau_max` (to bisection accuracy in `log τ`) with `max(β2, β3) <= 1/2` and an
/// invariant ball of radius `K = max(2 C_D ‖W0‖∞, m)`.
pub fn select_tau(params: &ProblemParams, c_d: f64, w0_sup: f64, tau_max: f64) -> Result<TauChoice> {
    let k = (2.0 * c_d * w0_sup).max(params.mass);
    let ok = |tau: f64| -> Result<bool> {
        let (b2, b3) = beta_constants(params, c_d, k, tau)?;
        let inv = invariance_bound(params, c_d, k, tau)?;
        Ok(b2.max(b3) <= 0.5 && inv <= 0.5 * k.max(f64::MIN_POSITIVE))
    };
    let choice = |tau: f64| -> Result<TauChoice> {
        let (beta2, beta3) = beta_constants(params, c_d, k, tau)?;
        Ok(TauChoice { tau, k, beta2, beta3, invariance: invariance_bound(params, c_d, k, tau)? })
    };
    if k == 0.0 || ok(tau_max)? {
        return choice(tau_max);
    }
    let (mut lo, mut hi) = (libm::log(tau_max) - 60.0, libm::log(tau_max));
    if !ok(libm::exp(lo))? {
        return Err(Error::Inconclusive("no admissible tau above exp(-60) tau_max".into()));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if ok(libm::exp(mid))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    choice(libm::exp(lo))
}
