//! Time stepping of the transformed problem `w_t = Δw + N^2 w f(w + r w_r / N)`, `w(1) = m`,
//! with pullback to `u(t, x) = x w(t/N^2, x^(1/N))`.
//!
//! Diffusion is implicit (backward Euler on `W = w - m`), the reaction explicit. All times in
//! [`SolverConfig`] and in [`Frame`] are original times `t = N^2 s`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::slope_functional;
use crate::grid::RadialGrid;
use crate::heat::RadialHeatOperator;
use crate::params::{Epsilon, ProblemParams, Reaction};
use crate::profile::{MassProfile, RadialProfile};
use crate::stencil::radial_gradient;
use crate::transform::{native_time, pullback_derivative, theta0, theta0_inverse, transformed_time};

/// Floor on `u_x` when bounding `q u_x^(q-1)` for step sizing in the limit problem.
pub const SLOPE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DtPolicy {
    Fixed { dt: f64 },
    /// `dt = dt_max / (1 + N^2 ‖w‖∞ · slope)` with `slope` the reaction's slope bound.
    Adaptive { dt_max: f64 },
}

impl DtPolicy {
    fn dt_max(&self) -> f64 {
        match *self {
            DtPolicy::Fixed { dt } => dt,
            DtPolicy::Adaptive { dt_max } => dt_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: DtPolicy,
    /// Blow-up is declared once `N[u] > blow_threshold`.
    pub blow_threshold: f64,
    /// Steady state once `sup |w(t_k) - w(t_(k-1))| / (t_k - t_(k-1)) < convergence_tol` between
    /// output frames.
    pub convergence_tol: f64,
    pub t_end: f64,
    pub output_interval: f64,
    pub max_steps: usize,
    /// Decreasing `eps` values for [`run_schedule`].
    pub epsilon_schedule: Vec<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: DtPolicy::Fixed { dt: 1e-4 },
            blow_threshold: 1e3,
            convergence_tol: 1e-6,
            t_end: 1.0,
            output_interval: 0.01,
            max_steps: 10_000_000,
            epsilon_schedule: Vec::new(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let dt = self.dt.dt_max();
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("dt = {dt} must be positive")));
        }
        if !(self.t_end > 0.0 && self.output_interval > 0.0) {
            return Err(Error::InvalidInput("t_end and output_interval must be positive".into()));
        }
        if !(self.convergence_tol >= 0.0) || !(self.blow_threshold > 0.0) {
            return Err(Error::InvalidInput("thresholds must be positive".into()));
        }
        if self.epsilon_schedule.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidInput("epsilon schedule must be strictly decreasing".into()));
        }
        if self.epsilon_schedule.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::InvalidInput("epsilon schedule entries must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    BlownUp,
    Converged,
    HorizonReached,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::BlownUp => "blown_up",
            Status::Converged => "converged",
            Status::HorizonReached => "horizon_reached",
        }
    }
}

/// Per-run event counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounters {
    /// Negative power arguments clamped to zero (limit problem).
    pub clamp_events: u64,
    /// Evaluations of `f_eps` left of its switch point.
    pub extension_events: u64,
}

impl StepCounters {
    fn add(&mut self, other: StepCounters) {
        self.clamp_events += other.clamp_events;
        self.extension_events += other.extension_events;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// Original time.
    pub t: f64,
    pub w: RadialProfile,
    /// `N[u] = max_j w_j`.
    pub n_u: f64,
    pub sup_w: f64,
    /// `√t max_j |u_x|`.
    pub sqrt_t_c1: f64,
}

impl Frame {
    fn new(t: f64, w: RadialProfile, dim: u32) -> Self {
        let n_u = if w.is_finite() { w.values().iter().copied().fold(f64::NEG_INFINITY, f64::max) } else { f64::INFINITY };
        let ux = pullback_derivative(&w, dim);
        let c1 = ux.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
        Frame { t, n_u, sup_w: w.sup_norm(), sqrt_t_c1: libm::sqrt(t) * c1, w }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: ProblemParams,
    pub frames: Vec<Frame>,
    pub status: Status,
    pub stop_reason: String,
    /// Original time at which the run stopped.
    pub final_time: f64,
    /// `N[u]` at which blow-up was declared.
    pub blow_up_value: Option<f64>,
    pub steps: u64,
    pub counters: StepCounters,
    pub initial_slope: f64,
}

impl Trajectory {
    pub fn grid(&self) -> &RadialGrid {
        self.frames[0].w.grid()
    }

    pub fn last(&self) -> &Frame {
        self.frames.last().expect("a trajectory has at least one frame")
    }

    /// Original time of blow-up, if declared.
    pub fn blow_up_time(&self) -> Option<f64> {
        (self.status == Status::BlownUp).then_some(self.final_time)
    }

    /// The frame recorded at `t` (within `1e-9` relative), if any.
    pub fn frame_at(&self, t: f64) -> Option<&Frame> {
        self.frames.iter().find(|f| (f.t - t).abs() <= 1e-9 * t.abs().max(1.0))
    }
}

/// One explicit-reaction, implicit-diffusion stepper on a fixed grid.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: ProblemParams,
    reaction: Reaction,
    op: RadialHeatOperator,
}

impl Stepper {
    pub fn new(grid: &RadialGrid, params: &ProblemParams) -> Self {
        Stepper { params: *params, reaction: params.reaction(), op: RadialHeatOperator::new(grid, params.ball_dim()) }
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    /// Step size in transformed time under `policy` for the state `w`.
    pub fn step_size(&self, w: &RadialProfile, policy: DtPolicy) -> f64 {
        let n2 = self.params.n() * self.params.n();
        match policy {
            DtPolicy::Fixed { dt } => dt / n2,
            DtPolicy::Adaptive { dt_max } => {
                let ux = pullback_derivative(w, self.params.dim);
                let ux_min = ux.iter().copied().fold(f64::INFINITY, f64::min);
                let slope = self.reaction.slope_bound(ux_min, SLOPE_FLOOR);
                dt_max / n2 / (1.0 + n2 * w.sup_norm() * slope)
            }
        }
    }

    /// Advances `w` by a transformed time `ds`. Non-finite values are propagated, not rejected.
    pub fn step(&self, w: &RadialProfile, ds: f64) -> Result<(RadialProfile, StepCounters)> {
        if w.grid() != self.op.grid() {
            return Err(Error::GridMismatch);
        }
        if !(ds > 0.0) {
            return Err(Error::InvalidInput(format!("dt = {ds} must be > 0")));
        }
        let n = self.params.n();
        let m = self.params.mass;
        let r = w.grid().nodes();
        let v = w.values();
        let g = radial_gradient(r, v);
        let mut counters = StepCounters::default();
        let interior = v.len() - 1;
        let mut rhs = Vec::with_capacity(interior);
        for j in 0..interior {
            let e = self.reaction.eval(v[j] + r[j] * g[j] / n);
            counters.clamp_events += e.clamped as u64;
            counters.extension_events += e.extended as u64;
            rhs.push(v[j] - m + ds * n * n * v[j] * e.value);
        }
        let mut next = if rhs.iter().all(|x| x.is_finite()) {
            self.op.solve_implicit(ds, &rhs)?
        } else {
            rhs
        };
        for x in next.iter_mut() {
            *x += m;
        }
        next.push(m);
        Ok((RadialProfile::new(w.grid().clone(), next)?, counters))
    }
}

fn check_boundary(w: &RadialProfile, params: &ProblemParams) -> Result<()> {
    if (w.mass() - params.mass).abs() > 1e-12 * params.mass.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "w(1) = {} differs from m = {}",
            w.mass(),
            params.mass
        )));
    }
    Ok(())
}

/// One IMEX step of the regularized problem over transformed time `dt`.
pub fn step_tpde_eps(w: &RadialProfile, dt: f64, params: &ProblemParams) -> Result<RadialProfile> {
    if params.epsilon.is_limit() {
        return Err(Error::InvalidInput("step_tpde_eps needs eps > 0".into()));
    }
    check_boundary(w, params)?;
    Ok(Stepper::new(w.grid(), params).step(w, dt)?.0)
}

/// One IMEX step of the limit problem; the power argument is clamped at zero and each clamp is
/// counted.
pub fn step_tpde_limit(w: &RadialProfile, dt: f64, params: &ProblemParams) -> Result<(RadialProfile, StepCounters)> {
    check_boundary(w, params)?;
    let limit = ProblemParams { epsilon: Epsilon::Limit, ..*params };
    Stepper::new(w.grid(), &limit).step(w, dt)
}

/// Evolves `u0` under `params` until blow-up, steady state or the horizon.
pub fn run(u0: &MassProfile, config: &SolverConfig, params: &ProblemParams) -> Result<Trajectory> {
    config.validate()?;
    if u0.dim() != params.dim {
        return Err(Error::InvalidInput(format!("profile is for N = {}, params for N = {}", u0.dim(), params.dim)));
    }
    if (u0.mass() - params.mass).abs() > 1e-12 * params.mass.max(1.0) {
        return Err(Error::InvalidInput(format!("u0(1) = {} differs from m = {}", u0.mass(), params.mass)));
    }
    let initial_slope = slope_functional(u0)?;
    if !(config.blow_threshold > initial_slope) {
        return Err(Error::InvalidInput(format!(
            "blow threshold {} must exceed N[u0] = {initial_slope}",
            config.blow_threshold
        )));
    }
    let mut w = theta0(u0)?.lift_removed().with_lift(params.mass);
    let dim = params.dim;
    let stepper = Stepper::new(u0.grid(), params);
    let s_end = transformed_time(config.t_end, dim);
    let s_out = transformed_time(config.output_interval, dim);

    let mut frames = alloc::vec![Frame::new(0.0, w.clone(), dim)];
    let mut counters = StepCounters::default();
    let mut s = 0.0;
    let mut next_output = 1u64;
    let mut steps = 0u64;
    let finish = |frames: Vec<Frame>, status, reason: String, s: f64, steps, counters, blow: Option<f64>| Trajectory {
        params: *params,
        frames,
        status,
        stop_reason: reason,
        final_time: native_time(s, dim),
        blow_up_value: blow,
        steps,
        counters,
        initial_slope,
    };

    loop {
        let target = (next_output as f64 * s_out).min(s_end);
        let mut ds = stepper.step_size(&w, config.dt);
        let at_output = s + ds >= target * (1.0 - 1e-12);
        if at_output {
            ds = target - s;
        }
        let (next, c) = stepper.step(&w, ds)?;
        counters.add(c);
        steps += 1;
        s = if at_output { target } else { s + ds };
        w = next;

        let n_u = if w.is_finite() { w.values().iter().copied().fold(f64::NEG_INFINITY, f64::max) } else { f64::INFINITY };
        if !(n_u <= config.blow_threshold) {
            let reason = if n_u.is_finite() {
                format!("N[u] = {n_u} exceeded threshold {}", config.blow_threshold)
            } else {
                "non-finite state".into()
            };
            if w.is_finite() {
                frames.push(Frame::new(native_time(s, dim), w.clone(), dim));
            }
            return Ok(finish(frames, Status::BlownUp, reason, s, steps, counters, Some(n_u)));
        }
        if at_output {
            let frame = Frame::new(native_time(s, dim), w.clone(), dim);
            let prev = frames.last().unwrap();
            let rate = frame.w.sup_distance(&prev.w)? / (frame.t - prev.t);
            frames.push(frame);
            next_output += 1;
            if rate < config.convergence_tol {
                let reason = format!("frame-to-frame rate {rate} below {}", config.convergence_tol);
                return Ok(finish(frames, Status::Converged, reason, s, steps, counters, None));
            }
            if target >= s_end {
                return Ok(finish(frames, Status::HorizonReached, "horizon reached".into(), s, steps, counters, None));
            }
        }
        if steps as usize >= config.max_steps {
            frames.push(Frame::new(native_time(s, dim), w.clone(), dim));
            return Ok(finish(frames, Status::HorizonReached, "step limit reached".into(), s, steps, counters, None));
        }
    }
}

/// One run per entry of `config.epsilon_schedule`, same `u0`.
pub fn run_schedule(u0: &MassProfile, config: &SolverConfig, params: &ProblemParams) -> Result<Vec<Trajectory>> {
    config.validate()?;
    config
        .epsilon_schedule
        .iter()
        .map(|&e| run(u0, config, &params.with_epsilon(Epsilon::Positive(e))?))
        .collect()
}

/// A frame in original variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulledFrame {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub u_x: Vec<f64>,
    /// `N^(2/q) u_x`, the chemotaxis density at radius `r_j` and time `t / N^2`.
    pub rho: Vec<f64>,
}

impl PulledFrame {
    /// `|S^(N-1)| ∫_0^1 rho(r) r^(N-1) dr` by the trapezoidal rule on the radial grid.
    pub fn density_mass(&self, r: &[f64], dim: u32) -> f64 {
        let n = dim as f64;
        let sphere = 2.0 * libm::pow(core::f64::consts::PI, 0.5 * n) / libm::tgamma(0.5 * n);
        let f: Vec<f64> = self.rho.iter().zip(r).map(|(p, r)| p * libm::pow(*r, n - 1.0)).collect();
        let integral: f64 = r.windows(2).zip(f.windows(2)).map(|(r, f)| 0.5 * (r[1] - r[0]) * (f[0] + f[1])).sum();
        sphere * integral
    }
}

pub fn pullback_frame(frame: &Frame, params: &ProblemParams) -> Result<PulledFrame> {
    let dim = params.dim;
    let (u, t) = theta0_inverse(&frame.w, dim, transformed_time(frame.t, dim))?;
    let u_x = pullback_derivative(&frame.w, dim);
    let scale = libm::pow(params.n(), 2.0 / params.q());
    Ok(PulledFrame {
        t,
        x: u.x_nodes(),
        u: u.values().to_vec(),
        rho: u_x.iter().map(|v| scale * v).collect(),
        u_x,
    })
}

pub fn pullback_trajectory(traj: &Trajectory) -> Result<Vec<PulledFrame>> {
    traj.frames.iter().map(|f| pullback_frame(f, &traj.params)).collect()
}
