//! Steady states by shooting on `w'' + (d-1)/r w' + N^2 w (w + r w'/N)^q = 0`, `w(0) = a`,
//! `w'(0) = 0`, and estimates of the critical mass `M`.
//!
//! `a = w(0) = U'(0)` is the slope of the steady profile at the origin and `m(a) = w(1; a)`
//! its mass. The static estimate is `sup_a m(a)`; the dynamic one bisects on the outcome of
//! [`evolve::run`](crate::evolve::run).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{run, SolverConfig, Status};
use crate::grid::RadialGrid;
use crate::params::ProblemParams;
use crate::profile::{MassProfile, RadialProfile};
use crate::transform::theta0_inverse;

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingRecord {
    pub a: f64,
    pub m_of_a: f64,
    /// `w` on a uniform grid with `steps` intervals.
    pub profile: RadialProfile,
    /// `u_x = w + r w'/N` at the same nodes.
    pub u_x: Vec<f64>,
    /// `u_x >= -1e-10 a` everywhere.
    pub monotone: bool,
    /// Start of a trailing interval on which `u_x < 1e-6 a`, if it begins before `r = 1`.
    pub support_edge: Option<f64>,
    pub clamp_events: u64,
    pub finite: bool,
}

impl ShootingRecord {
    /// The steady profile `U(x) = x w(x^(1/N))`.
    pub fn steady_profile(&self, dim: u32) -> Result<MassProfile> {
        Ok(theta0_inverse(&self.profile, dim, 0.0)?.0)
    }
}

/// RK4 with `steps` uniform steps; the first step uses the series
/// `w ≈ a - N^2 a^(1+q) r^2 / (2d)`.
pub fn shoot(a: f64, params: &ProblemParams, steps: usize) -> Result<ShootingRecord> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidInput(format!("a = {a} must be finite and >= 0")));
    }
    if steps < 4 {
        return Err(Error::InvalidInput("need at least 4 steps".into()));
    }
    let n = params.n();
    let q = params.q();
    let d = params.ball_dim() as f64;
    let h = 1.0 / steps as f64;
    let mut clamps = 0u64;
    let mut rhs = |r: f64, w: f64, p: f64| -> f64 {
        let s = w + r * p / n;
        let f = if s > 0.0 {
            libm::pow(s, q)
        } else {
            if s < 0.0 {
                clamps += 1;
            }
            0.0
        };
        -(d - 1.0) / r * p - n * n * w * f
    };

    let c = n * n * libm::pow(a, 1.0 + q) / d;
    let mut w = alloc::vec![a, a - 0.5 * c * h * h];
    let mut p = alloc::vec![0.0, -c * h];
    let (mut wc, mut pc) = (w[1], p[1]);
    for i in 1..steps {
        let r = i as f64 * h;
        let k1w = pc;
        let k1p = rhs(r, wc, pc);
        let k2w = pc + 0.5 * h * k1p;
        let k2p = rhs(r + 0.5 * h, wc + 0.5 * h * k1w, pc + 0.5 * h * k1p);
        let k3w = pc + 0.5 * h * k2p;
        let k3p = rhs(r + 0.5 * h, wc + 0.5 * h * k2w, pc + 0.5 * h * k2p);
        let k4w = pc + h * k3p;
        let k4p = rhs(r + h, wc + h * k3w, pc + h * k3p);
        wc += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        pc += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        w.push(wc);
        p.push(pc);
    }
    let grid = RadialGrid::uniform(steps)?;
    let u_x: Vec<f64> = grid.nodes().iter().zip(w.iter().zip(&p)).map(|(r, (w, p))| w + r * p / n).collect();
    let finite = w.iter().chain(&p).all(|v| v.is_finite());
    let monotone = finite && u_x.iter().all(|v| *v >= -1e-10 * a);
    let support_edge = if a > 0.0 && finite {
        let tol = 1e-6 * a;
        let tail = u_x.iter().rev().take_while(|v| **v < tol).count();
        (tail > 0).then(|| grid.nodes()[u_x.len() - tail])
    } else {
        None
    };
    Ok(ShootingRecord {
        a,
        m_of_a: *w.last().unwrap(),
        profile: RadialProfile::new(grid, w)?,
        u_x,
        monotone,
        support_edge,
        clamp_events: clamps,
        finite,
    })
}

/// Shooting map `a -> m(a)` with `steps` RK4 steps.
pub fn mass_of_slope(a: f64, params: &ProblemParams, steps: usize) -> Result<f64> {
    let rec = shoot(a, params, steps)?;
    if !rec.finite {
        return Err(Error::Internal(format!("shooting from a = {a} produced non-finite values")));
    }
    Ok(rec.m_of_a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticEstimate {
    pub mass: f64,
    /// Maximizing (or first plateau) slope.
    pub a_star: f64,
    pub steps: usize,
    /// `(a, m(a))` samples of the geometric scan at the final resolution.
    pub scan: Vec<(f64, f64)>,
    /// The shooting map reached a plateau rather than an interior maximum.
    pub plateau: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticOptions {
    pub steps: usize,
    pub max_steps: usize,
    /// Scan `a = 2^k` for `k` in this range.
    pub log2_range: (i32, i32),
}

impl Default for StaticOptions {
    fn default() -> Self {
        StaticOptions { steps: 1000, max_steps: 64000, log2_range: (-6, 16) }
    }
}

fn static_at(params: &ProblemParams, tol: f64, steps: usize, range: (i32, i32)) -> Result<StaticEstimate> {
    let mut scan = Vec::new();
    for k in range.0..=range.1 {
        let a = libm::ldexp(1.0, k);
        scan.push((a, mass_of_slope(a, params, steps)?));
    }
    // first decrease or plateau of the scan
    let rel = |x: f64, y: f64| (y - x) / x.abs().max(f64::MIN_POSITIVE);
    let mut found = None;
    for i in 1..scan.len() {
        let change = rel(scan[i - 1].1, scan[i].1);
        if change < 0.0 {
            found = Some((i - 1, false));
            break;
        }
        if change < 0.1 * tol && i >= 2 && rel(scan[i - 2].1, scan[i - 1].1) < tol {
            found = Some((i, true));
            break;
        }
    }
    let Some((i, plateau)) = found else {
        return Err(Error::Inconclusive(format!(
            "shooting map still increasing at a = {}: m = {} (no bracket for a maximum)",
            scan.last().unwrap().0,
            scan.last().unwrap().1
        )));
    };
    if plateau {
        let (a, m) = scan[i];
        return Ok(StaticEstimate { mass: m, a_star: a, steps, scan, plateau });
    }
    // golden section in log a on [a_(i-1), a_(i+1)]
    let lo_i = i.saturating_sub(1);
    let (mut lo, mut hi) = (libm::log(scan[lo_i].0), libm::log(scan[i + 1].0));
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let f = |x: f64| mass_of_slope(libm::exp(x), params, steps);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..60 {
        if hi - lo < 1e-6 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let (x, m) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    let best = scan.iter().map(|s| s.1).fold(m, f64::max);
    Ok(StaticEstimate { mass: best, a_star: libm::exp(x), steps, scan, plateau })
}

/// `max_a m(a)`, refining the integration until two successive resolutions agree to `tol`
/// (relative).
pub fn critical_mass_static(params: &ProblemParams, tol: f64, opts: &StaticOptions) -> Result<StaticEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol = {tol} must be > 0")));
    }
    let mut steps = opts.steps;
    let mut prev = static_at(params, tol, steps, opts.log2_range)?;
    while steps < opts.max_steps {
        steps *= 2;
        let next = static_at(params, tol, steps, opts.log2_range)?;
        if (next.mass - prev.mass).abs() < tol * next.mass {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Inconclusive(format!(
        "static estimate did not settle by {steps} steps (last {})",
        prev.mass
    )))
}

/// A steady state of mass `m`: bisection for `m(a) = m` on the increasing branch below `a_max`.
pub fn steady_state(params: &ProblemParams, a_max: f64, steps: usize) -> Result<ShootingRecord> {
    let m = params.mass;
    if m == 0.0 {
        return shoot(0.0, params, steps);
    }
    let top = mass_of_slope(a_max, params, steps)?;
    if top < m {
        return Err(Error::Inconclusive(format!(
            "no steady state of mass {m}: the shooting map reaches {top} at a = {a_max}"
        )));
    }
    let (mut lo, mut hi) = (0.0, a_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass_of_slope(mid, params, steps)? < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    shoot(0.5 * (lo + hi), params, steps)
}

/// Initial data for the dynamic estimator: `u0 = m * shape` with `shape(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialShape {
    /// `u0 = m x`, the preimage of the constant `w = m`.
    Affine,
    Profile(MassProfile),
}

impl InitialShape {
    pub fn profile(&self, grid: &RadialGrid, dim: u32, m: f64) -> Result<MassProfile> {
        match self {
            InitialShape::Affine => MassProfile::from_fn(grid, dim, |x| m * x),
            InitialShape::Profile(p) => {
                if p.grid() != grid || p.dim() != dim {
                    return Err(Error::GridMismatch);
                }
                if p.mass() != 1.0 {
                    return Err(Error::InvalidInput("shape must take the value 1 at x = 1".into()));
                }
                Ok(p.scaled(m))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub mass: f64,
    pub status: Status,
    pub horizon: f64,
    pub stop_reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicEstimate {
    pub mass: f64,
    /// Largest converged and smallest blown-up mass probed.
    pub bracket: (f64, f64),
    pub probes: Vec<Probe>,
    /// No converged probe lies above a blown-up one.
    pub monotone: bool,
    /// Bisection stopped early on a probe that stayed inconclusive at the horizon cap.
    pub inconclusive_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicOptions {
    pub grid: RadialGrid,
    pub config: SolverConfig,
    /// Horizons are doubled at most this many times for an inconclusive probe.
    pub horizon_doublings: u32,
    pub shape: InitialShape,
}

/// Runs one probe at mass `m`, doubling the horizon while the outcome is `horizon_reached`.
pub fn classify(params: &ProblemParams, m: f64, opts: &DynamicOptions) -> Result<Probe> {
    let p = params.with_mass(m)?;
    let u0 = opts.shape.profile(&opts.grid, p.dim, m)?;
    let mut config = opts.config.clone();
    for k in 0..=opts.horizon_doublings {
        let traj = run(&u0, &config, &p)?;
        if traj.status != Status::HorizonReached || k == opts.horizon_doublings {
            return Ok(Probe { mass: m, status: traj.status, horizon: config.t_end, stop_reason: traj.stop_reason });
        }
        config.t_end *= 2.0;
    }
    unreachable!()
}

/// Bisection on `m` between a converged `m_lo` and a blown-up `m_hi` until the bracket is
/// narrower than `tol` (absolute).
pub fn critical_mass_dynamic(
    params: &ProblemParams,
    m_lo: f64,
    m_hi: f64,
    tol: f64,
    opts: &DynamicOptions,
) -> Result<DynamicEstimate> {
    critical_mass_dynamic_with(m_lo, m_hi, tol, |m| classify(params, m, opts))
}

/// [`critical_mass_dynamic`] with a caller-supplied classifier.
pub fn critical_mass_dynamic_with(
    m_lo: f64,
    m_hi: f64,
    tol: f64,
    mut probe: impl FnMut(f64) -> Result<Probe>,
) -> Result<DynamicEstimate> {
    if !(m_lo < m_hi) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("need m_lo < m_hi and tol > 0, got [{m_lo}, {m_hi}], {tol}")));
    }
    let lo_probe = probe(m_lo)?;
    let hi_probe = probe(m_hi)?;
    if lo_probe.status != Status::Converged || hi_probe.status != Status::BlownUp {
        return Err(Error::InvalidBracket(format!(
            "m_lo = {m_lo} is {}, m_hi = {m_hi} is {}",
            lo_probe.status.as_str(),
            hi_probe.status.as_str()
        )));
    }
    let mut probes = alloc::vec![lo_probe, hi_probe];
    let (mut lo, mut hi) = (m_lo, m_hi);
    let mut inconclusive_at = None;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let p = probe(mid)?;
        let status = p.status;
        probes.push(p);
        match status {
            Status::Converged => lo = mid,
            Status::BlownUp => hi = mid,
            Status::HorizonReached => {
                inconclusive_at = Some(mid);
                break;
            }
        }
    }
    let max_converged = probes
        .iter()
        .filter(|p| p.status == Status::Converged)
        .map(|p| p.mass)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_blown = probes
        .iter()
        .filter(|p| p.status == Status::BlownUp)
        .map(|p| p.mass)
        .fold(f64::INFINITY, f64::min);
    Ok(DynamicEstimate {
        mass: 0.5 * (lo + hi),
        bracket: (lo, hi),
        monotone: max_converged < min_blown,
        probes,
        inconclusive_at,
    })
}
