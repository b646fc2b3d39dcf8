//! Property checks over trajectories, each producing a serializable [`CheckReport`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{Frame, Trajectory};
use crate::functional::holder_seminorm_at_origin;
use crate::profile::MassProfile;
use crate::transform::{pullback_derivative, pullback_diffusion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub status: CheckStatus,
    pub reason: Option<String>,
    pub metrics: BTreeMap<String, f64>,
    /// Per-row measurements, e.g. one gap row per `eps`.
    pub table: Vec<Vec<f64>>,
}

impl CheckReport {
    fn new(check: &str) -> Self {
        CheckReport { check: check.to_string(), status: CheckStatus::Pass, reason: None, metrics: BTreeMap::new(), table: Vec::new() }
    }

    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    fn fail(&mut self, reason: String) {
        if self.status != CheckStatus::Fail {
            self.status = CheckStatus::Fail;
            self.reason = Some(reason);
        }
    }

    fn skip(mut self, reason: String) -> Self {
        self.status = CheckStatus::Skipped;
        self.reason = Some(reason);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// `10 (h^2 + dt) scale`.
pub fn default_slack(h: f64, dt: f64, scale: f64) -> f64 {
    10.0 * (h * h + dt) * scale
}

fn frame_u(frame: &Frame, x: &[f64]) -> Vec<f64> {
    frame.w.values().iter().zip(x).map(|(w, x)| w * x).collect()
}

fn same_grid(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.grid() != b.grid() || a.params.dim != b.params.dim {
        return Err(Error::InvalidInput("trajectories live on different grids".into()));
    }
    Ok(())
}

/// Pairs of frames of `a` and `b` at common times.
fn common_frames<'a>(a: &'a Trajectory, b: &'a Trajectory) -> Vec<(&'a Frame, &'a Frame)> {
    a.frames.iter().filter_map(|f| b.frame_at(f.t).map(|g| (f, g))).collect()
}

/// `u1 <= u2 + slack` on every common frame. Requires `m1 <= m2`; the initial ordering is
/// checked as the `t = 0` frame.
pub fn check_comparison(run1: &Trajectory, run2: &Trajectory, slack: f64) -> Result<CheckReport> {
    same_grid(run1, run2)?;
    let mut rep = CheckReport::new("comparison");
    rep.metric("slack", slack);
    rep.metric("m1", run1.params.mass);
    rep.metric("m2", run2.params.mass);
    if run1.params.mass > run2.params.mass {
        return Ok(rep.skip(format!("boundary values not ordered: m1 = {} > m2 = {}", run1.params.mass, run2.params.mass)));
    }
    let x = run1.grid().x_nodes(run1.params.dim);
    let mut worst = f64::INFINITY;
    let (mut worst_t, mut worst_x) = (0.0, 0.0);
    let pairs = common_frames(run1, run2);
    for (f1, f2) in &pairs {
        let (u1, u2) = (frame_u(f1, &x), frame_u(f2, &x));
        for j in 0..x.len() {
            let d = u2[j] - u1[j];
            if d < worst {
                worst = d;
                worst_t = f1.t;
                worst_x = x[j];
            }
        }
    }
    rep.metric("frames", pairs.len() as f64);
    rep.metric("worst_violation", (-worst).max(0.0));
    rep.metric("worst_t", worst_t);
    rep.metric("worst_x", worst_x);
    if pairs.is_empty() {
        return Ok(rep.skip("no common frames".into()));
    }
    if worst < -slack {
        rep.fail(format!("u2 - u1 = {worst} at t = {worst_t}, x = {worst_x}"));
    }
    Ok(rep)
}

/// Along `runs` (intended order: decreasing `eps`) each `w` dominates its predecessor within
/// `slack`, and blow-up times do not increase.
pub fn check_eps_monotone(runs: &[Trajectory], slack: f64) -> Result<CheckReport> {
    let mut rep = CheckReport::new("eps_monotone");
    rep.metric("slack", slack);
    rep.metric("runs", runs.len() as f64);
    for pair in runs.windows(2) {
        same_grid(&pair[0], &pair[1])?;
    }
    let mut worst_all: f64 = 0.0;
    for pair in runs.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let mut worst = f64::INFINITY;
        let mut at = 0.0;
        for (fa, fb) in common_frames(a, b) {
            for (va, vb) in fa.w.values().iter().zip(fb.w.values()) {
                if vb - va < worst {
                    worst = vb - va;
                    at = fa.t;
                }
            }
        }
        let eps = |t: &Trajectory| t.params.epsilon.value();
        rep.table.push(alloc::vec![eps(a), eps(b), worst, at]);
        worst_all = worst_all.max(-worst);
        if worst < -slack {
            rep.fail(format!("w(eps={}) - w(eps={}) = {worst} at t = {at}", eps(b), eps(a)));
        }
        match (a.blow_up_time(), b.blow_up_time()) {
            (Some(ta), Some(tb)) if tb > ta + slack => {
                rep.fail(format!("blow-up time {tb} at eps = {} exceeds {ta} at eps = {}", eps(b), eps(a)))
            }
            (Some(ta), None) if b.final_time > ta => {
                rep.fail(format!("eps = {} blew up at {ta}, eps = {} did not", eps(a), eps(b)))
            }
            _ => {}
        }
    }
    rep.metric("worst_violation", worst_all);
    Ok(rep)
}

fn least_squares_1(x: &[f64], y: &[f64]) -> f64 {
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    sxy / sxx
}

/// Least squares `y ≈ c1 a + c2 b`.
fn least_squares_2(a: &[f64], b: &[f64], y: &[f64]) -> (f64, f64) {
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
    let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
    let (ay, by) = (dot(a, y), dot(b, y));
    let det = aa * bb - ab * ab;
    ((ay * bb - by * ab) / det, (aa * by - ab * ay) / det)
}

/// Fits `u_x(x) - u_x(0)` on the first `window` nodes against `x^(2/N)`.
pub fn check_expansion(x: &[f64], u_x: &[f64], dim: u32, window: usize) -> Result<CheckReport> {
    if window < 8 || window > x.len() || x.len() != u_x.len() {
        return Err(Error::InvalidInput(format!("fit window {window} needs 8 <= J <= {}", x.len())));
    }
    let n = dim as f64;
    let target = 2.0 / n;
    let mut rep = CheckReport::new("expansion");
    rep.metric("target_slope", target);
    let xs = &x[1..window];
    let s: Vec<f64> = u_x[1..window].iter().map(|v| v - u_x[0]).collect();
    let scale = s.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
    if scale <= 1e-12 * u_x[0].abs().max(1.0) {
        rep.metric("b", 0.0);
        return Ok(rep.skip("zero signal: u_x is constant near the origin".into()));
    }
    let big: Vec<f64> = xs.iter().map(|x| libm::pow(*x, target)).collect();
    let b = least_squares_1(&big, &s);
    let residual = s.iter().zip(&big).map(|(s, g)| (s - b * g).abs()).fold(0.0, f64::max);
    rep.metric("b", b);
    rep.metric("residual", residual);

    let pts: Vec<(f64, f64)> = xs.iter().zip(&s).filter(|(_, s)| s.abs() > 0.0).map(|(x, s)| (libm::log(*x), libm::log(s.abs()))).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
    rep.metric("slope", slope);
    if (slope - target).abs() > 0.1 * target {
        rep.fail(format!("log-log slope {slope} outside {target} ± 10%"));
    }

    let half: Vec<f64> = xs.iter().map(|x| libm::pow(*x, 0.5 * target)).collect();
    let (c1, c2) = least_squares_2(&half, &big, &s);
    let x_end = xs[xs.len() - 1];
    let odd = c1.abs() * libm::pow(x_end, 0.5 * target);
    let even = c2.abs() * libm::pow(x_end, target);
    rep.metric("c_half", c1);
    rep.metric("c_full", c2);
    rep.metric("odd_ratio", odd / even);
    if odd > 0.05 * even {
        rep.fail(format!("x^(1/N) contribution {odd} exceeds 5% of the x^(2/N) one ({even})"));
    }
    Ok(rep)
}

/// `holder_seminorm_at_origin(u, gamma)` on a refinement sequence; bounded means every ratio
/// between successive refinements is at most `1.5`.
pub fn check_holder_regularity_with(profiles: &[MassProfile], gamma: f64) -> Result<CheckReport> {
    if profiles.len() < 2 {
        return Err(Error::InvalidInput("need at least two resolutions".into()));
    }
    let mut rep = CheckReport::new("holder_regularity");
    rep.metric("gamma", gamma);
    let values: Vec<f64> = profiles.iter().map(|u| holder_seminorm_at_origin(u, gamma)).collect::<Result<_>>()?;
    for (u, v) in profiles.iter().zip(&values) {
        rep.table.push(alloc::vec![u.len() as f64, *v]);
    }
    let mut worst: f64 = 0.0;
    for w in values.windows(2) {
        // seminorms at rounding level count as zero
        let ratio = if w[0].max(w[1]) <= 1e-10 {
            1.0
        } else if w[0] > 0.0 {
            w[1] / w[0]
        } else {
            f64::INFINITY
        };
        worst = worst.max(ratio);
    }
    rep.metric("max_ratio", worst);
    rep.metric("seminorm", *values.last().unwrap());
    if !(worst <= 1.5) || !values.iter().all(|v| v.is_finite()) {
        rep.fail(format!("seminorm grows under refinement by up to {worst}"));
    }
    Ok(rep)
}

/// [`check_holder_regularity_with`] at the exponent `2/N`.
pub fn check_holder_regularity(profiles: &[MassProfile]) -> Result<CheckReport> {
    let dim = profiles.first().ok_or_else(|| Error::InvalidInput("no profiles".into()))?.dim();
    check_holder_regularity_with(profiles, 2.0 / dim as f64)
}

/// Gaps of `u` and `u_x` between each `eps` run and the limit run over frames with
/// `t` in `window`; they must not increase along `runs`, and the final `u_x` gap must be at
/// most `tol * ‖u_x‖∞`.
pub fn check_eps_to_limit(runs: &[Trajectory], limit: &Trajectory, window: (f64, f64), tol: f64) -> Result<CheckReport> {
    if !(window.0 > 0.0 && window.0 <= window.1) {
        return Err(Error::InvalidInput(format!("time window {window:?} must lie in (0, T]")));
    }
    let mut rep = CheckReport::new("eps_to_limit");
    rep.metric("tol", tol);
    let dim = limit.params.dim;
    let x = limit.grid().x_nodes(dim);
    let q = limit.params.q();
    let mut scale: f64 = 0.0;
    let mut gaps = Vec::new();
    for run in runs {
        same_grid(run, limit)?;
        let (mut gu, mut gux) = (0.0f64, 0.0f64);
        let mut frames = 0;
        for (fe, fl) in common_frames(run, limit) {
            if fe.t < window.0 * (1.0 - 1e-12) || fe.t > window.1 * (1.0 + 1e-12) {
                continue;
            }
            frames += 1;
            let (ue, ul) = (frame_u(fe, &x), frame_u(fl, &x));
            let (de, dl) = (pullback_derivative(&fe.w, dim), pullback_derivative(&fl.w, dim));
            for j in 0..x.len() {
                gu = gu.max((ue[j] - ul[j]).abs());
                gux = gux.max((de[j] - dl[j]).abs());
                scale = scale.max(dl[j].abs());
            }
        }
        if frames == 0 {
            return Ok(rep.skip("no common frames in the time window".into()));
        }
        gaps.push((run.params.epsilon.value(), gu, gux));
        rep.table.push(alloc::vec![run.params.epsilon.value(), gu, gux]);
    }
    if gaps.is_empty() {
        return Ok(rep.skip("empty schedule".into()));
    }
    for w in gaps.windows(2) {
        if w[1].1 > w[0].1 || w[1].2 > w[0].2 {
            rep.fail(format!("gaps not decreasing from eps = {} to eps = {}", w[0].0, w[1].0));
        }
    }
    let last = gaps[gaps.len() - 1];
    rep.metric("final_gap_u", last.1);
    rep.metric("final_gap_u_x", last.2);
    rep.metric("u_x_scale", scale);
    if last.2 > tol * scale {
        rep.fail(format!("final u_x gap {} above {tol} * {scale}", last.2));
    }

    // |u_xx| x^(1-q) on the smallest-eps run
    let smallest = &runs[runs.len() - 1];
    let mut k: f64 = 0.0;
    for f in &smallest.frames {
        if f.t < window.0 * (1.0 - 1e-12) || f.t > window.1 * (1.0 + 1e-12) {
            continue;
        }
        let diff = pullback_diffusion(&f.w, dim);
        for j in 1..x.len() - 1 {
            let uxx = diff[j] / libm::pow(x[j], 2.0 - 2.0 / dim as f64);
            k = k.max(uxx.abs() * libm::pow(x[j], 1.0 - q));
        }
    }
    rep.metric("second_derivative_k", k);
    if !k.is_finite() {
        rep.fail("second-derivative envelope is not finite".into());
    }
    Ok(rep)
}
