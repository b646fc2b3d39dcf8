use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use degen_core::evolve::{pullback_trajectory, run, DtPolicy, StepCounters};
use degen_core::heat::{measure_smoothing, EigenBasis, RadialHeatOperator, SmoothingMeasurement};
use degen_core::mild::{duhamel_fixed_point, select_tau, DuhamelOptions, TauChoice};
use degen_core::stationary::{
    critical_mass_dynamic, critical_mass_static, steady_state, DynamicEstimate, DynamicOptions, StaticEstimate,
    StaticOptions,
};
use degen_core::transform::{pullback_derivative, theta0};
use degen_core::verify::{
    check_comparison, check_eps_monotone, check_eps_to_limit, check_expansion, check_holder_regularity,
    check_holder_regularity_with, default_slack, CheckReport, CheckStatus,
};
use degen_core::{Epsilon, MassProfile, ProblemParams, RadialGrid, RadialProfile, SolverConfig, Spacing, Status, Trajectory};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Config, ConfigError, LoadedConfig};
use crate::output::{diagnostics_csv, frames_csv, write_atomic, write_json};

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub intervals: usize,
    pub spacing: Spacing,
}

impl GridInfo {
    fn of(grid: &RadialGrid) -> Self {
        GridInfo { intervals: grid.intervals(), spacing: grid.spacing() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub params: ProblemParams,
    pub grid: GridInfo,
    pub config_sha256: String,
    pub status: Option<Status>,
    pub stop_reason: Option<String>,
    pub wall_time_s: f64,
    pub complete: bool,
    pub steps: Option<u64>,
    pub final_time: Option<f64>,
    pub counters: Option<StepCounters>,
    pub error: Option<String>,
    pub config: toml::Table,
}

impl Manifest {
    fn new(command: &str, cfg: &LoadedConfig) -> Result<Self> {
        Ok(Manifest {
            command: command.into(),
            params: cfg.config.params()?,
            grid: GridInfo::of(&cfg.config.grid()?),
            config_sha256: cfg.sha256.clone(),
            status: None,
            stop_reason: None,
            wall_time_s: 0.0,
            complete: false,
            steps: None,
            final_time: None,
            counters: None,
            error: None,
            config: cfg.raw.clone(),
        })
    }
}

fn prepare(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

/// Runs the configured problem and writes `frames.csv`, `diagnostics.csv` and `manifest.json`.
pub fn cmd_solve(cfg: &LoadedConfig, out: &Path) -> Result<Trajectory> {
    prepare(out)?;
    let start = Instant::now();
    let mut manifest = Manifest::new("solve", cfg)?;
    write_json(&out.join("manifest.json"), &manifest)?;
    let result = (|| -> Result<Trajectory> {
        let params = cfg.config.params()?;
        let u0 = cfg.config.initial_profile()?;
        let traj = run(&u0, &cfg.config.solver()?, &params)?;
        let pulled = pullback_trajectory(&traj)?;
        write_atomic(&out.join("frames.csv"), frames_csv(&pulled).as_bytes())?;
        write_atomic(&out.join("diagnostics.csv"), diagnostics_csv(&traj).as_bytes())?;
        Ok(traj)
    })();
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    match &result {
        Ok(traj) => {
            manifest.status = Some(traj.status);
            manifest.stop_reason = Some(traj.stop_reason.clone());
            manifest.steps = Some(traj.steps);
            manifest.final_time = Some(traj.final_time);
            manifest.counters = Some(traj.counters);
            manifest.complete = true;
        }
        Err(e) => manifest.error = Some(format!("{e:#}")),
    }
    write_json(&out.join("manifest.json"), &manifest)?;
    result
}

pub const SUITES: [&str; 5] = ["comparison", "eps-monotone", "expansion", "holder", "eps-limit"];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckReport>,
    /// Constructed violations; each must fail.
    pub controls: Vec<CheckReport>,
    pub all_pass: bool,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<CheckReport>, controls: Vec<CheckReport>) -> Self {
        let all_pass = checks.iter().all(|c| c.status == CheckStatus::Pass)
            && controls.iter().all(|c| c.status == CheckStatus::Fail);
        SuiteReport { suite: suite.into(), checks, controls, all_pass }
    }
}

fn golden(k: usize, offset: f64) -> f64 {
    let phi = 0.618_033_988_749_894_9;
    (offset + k as f64 * phi).fract()
}

fn run_all(jobs: Vec<(MassProfile, ProblemParams)>, solver: &SolverConfig) -> Result<Vec<Trajectory>> {
    jobs.par_iter().map(|(u0, p)| Ok(run(u0, solver, p)?)).collect()
}

fn slack_for(grid: &RadialGrid, solver: &SolverConfig, trajs: &[&Trajectory]) -> f64 {
    let scale = trajs.iter().flat_map(|t| t.frames.iter()).map(|f| f.sup_w).fold(0.0, f64::max);
    let dt = match solver.dt {
        DtPolicy::Fixed { dt } => dt,
        DtPolicy::Adaptive { dt_max } => dt_max,
    };
    default_slack(grid.max_step(), dt, scale)
}

/// `pairs` ordered initial data `u1 <= u2` (same or smaller mass) plus two controls: swapped
/// arguments, and a run whose final frame is pushed below its partner.
pub fn comparison_suite(config: &Config, pairs: usize) -> Result<SuiteReport> {
    let params = config.params()?;
    let grid = config.grid()?;
    let solver = config.solver()?;
    let dim = params.dim;
    let m = params.mass;
    let mut jobs = Vec::new();
    for k in 0..pairs {
        let c_hi = 2.0 * golden(k, 0.1) - 1.0;
        let hi = MassProfile::from_fn(&grid, dim, |x| m * x * (1.0 + c_hi * (1.0 - x)))?;
        let lo = if k % 2 == 0 {
            let c_lo = -1.0 + (c_hi + 1.0) * golden(k, 0.7);
            MassProfile::from_fn(&grid, dim, |x| m * x * (1.0 + c_lo * (1.0 - x)))?
        } else {
            hi.scaled(0.3 + 0.7 * golden(k, 0.4))
        };
        jobs.push((lo.clone(), params.with_mass(lo.mass())?));
        jobs.push((hi, params));
    }
    let trajs = run_all(jobs, &solver)?;
    let mut checks = Vec::new();
    for pair in trajs.chunks(2) {
        let slack = slack_for(&grid, &solver, &[&pair[0], &pair[1]]);
        checks.push(check_comparison(&pair[0], &pair[1], slack)?);
    }
    let mut controls = Vec::new();
    if let Some(pair) = trajs.chunks(2).next() {
        let slack = slack_for(&grid, &solver, &[&pair[0], &pair[1]]);
        controls.push(check_comparison(&pair[1], &pair[0], slack)?);
        let mut broken = pair[1].clone();
        let last = broken.frames.last_mut().unwrap();
        let mid = last.w.values().len() / 2;
        let mut v = last.w.values().to_vec();
        v[mid] -= 0.5 * m.max(1.0) + 100.0 * slack;
        last.w = RadialProfile::new(grid.clone(), v)?;
        controls.push(check_comparison(&pair[0], &broken, slack)?);
    }
    Ok(SuiteReport::new("comparison", checks, controls))
}

fn schedule(solver: &SolverConfig) -> Vec<f64> {
    if solver.epsilon_schedule.is_empty() {
        vec![0.1, 0.03, 0.01, 0.003]
    } else {
        solver.epsilon_schedule.clone()
    }
}

fn schedule_runs(config: &Config, with_limit: bool) -> Result<(Vec<Trajectory>, Option<Trajectory>)> {
    let params = config.params()?;
    let solver = config.solver()?;
    let u0 = config.initial_profile()?;
    let mut jobs: Vec<(MassProfile, ProblemParams)> = schedule(&solver)
        .iter()
        .map(|&e| Ok((u0.clone(), params.with_epsilon(Epsilon::Positive(e))?)))
        .collect::<Result<_>>()?;
    if with_limit {
        jobs.push((u0.clone(), params.with_epsilon(Epsilon::Limit)?));
    }
    let mut trajs = run_all(jobs, &solver)?;
    let limit = if with_limit { trajs.pop() } else { None };
    Ok((trajs, limit))
}

pub fn eps_monotone_suite(config: &Config) -> Result<SuiteReport> {
    let grid = config.grid()?;
    let solver = config.solver()?;
    let (runs, _) = schedule_runs(config, false)?;
    let refs: Vec<&Trajectory> = runs.iter().collect();
    let slack = slack_for(&grid, &solver, &refs);
    let check = check_eps_monotone(&runs, slack)?;
    let mut reversed = runs.clone();
    reversed.reverse();
    let control = check_eps_monotone(&reversed, slack)?;
    Ok(SuiteReport::new("eps-monotone", vec![check], vec![control]))
}

fn expansion_window(grid: &RadialGrid) -> usize {
    (grid.len() / 16).max(8)
}

pub fn expansion_suite(config: &Config) -> Result<SuiteReport> {
    let params = config.params()?;
    let grid = config.grid()?;
    let traj = run(&config.initial_profile()?, &config.solver()?, &params)?;
    let frame = &traj.frames[traj.frames.len() / 2];
    let x = grid.x_nodes(params.dim);
    let ux = pullback_derivative(&frame.w, params.dim);
    let window = expansion_window(&grid);
    let mut check = check_expansion(&x, &ux, params.dim, window)?;
    check.metrics.insert("t".into(), frame.t);
    let n = params.n();
    let polluted: Vec<f64> = ux
        .iter()
        .zip(&x)
        .map(|(u, x)| u + 0.5 * frame.sup_w.max(1.0) * x.powf(1.0 / n))
        .collect();
    let control = check_expansion(&x, &polluted, params.dim, window)?;
    Ok(SuiteReport::new("expansion", vec![check], vec![control]))
}

/// The frame at the middle output time, on the configured grid and two refinements.
pub fn holder_suite(config: &Config) -> Result<SuiteReport> {
    let params = config.params()?;
    let solver = config.solver()?;
    let base = config.grid()?;
    let grids = [base.clone(), base.refined(), base.refined().refined()];
    let dim = params.dim;
    let u_shape = config.shape(&base)?;
    let jobs: Vec<(MassProfile, ProblemParams)> = grids
        .iter()
        .map(|g| {
            let u0 = match &u_shape {
                degen_core::stationary::InitialShape::Affine => MassProfile::from_fn(g, dim, |x| params.mass * x)?,
                degen_core::stationary::InitialShape::Profile(p) => degen_core::transform::resample(p, g)?.scaled(params.mass),
            };
            Ok((u0, params))
        })
        .collect::<Result<_>>()?;
    let trajs = run_all(jobs, &solver)?;
    let t_mid = trajs[0].frames[trajs[0].frames.len() / 2].t;
    let mut profiles = Vec::new();
    for tr in &trajs {
        let f = tr.frame_at(t_mid).context("refined run lacks the comparison frame")?;
        profiles.push(degen_core::transform::theta0_inverse(&f.w, dim, 0.0)?.0);
    }
    let mut check = check_holder_regularity(&profiles)?;
    check.metrics.insert("t".into(), t_mid);
    let control = check_holder_regularity_with(&profiles, 2.0 / params.n() + 0.3)?;
    Ok(SuiteReport::new("holder", vec![check], vec![control]))
}

pub fn eps_limit_suite(config: &Config) -> Result<SuiteReport> {
    let t_end = config.solver.t_end;
    let window = match config.verify.eps_limit_window {
        Some([a, b]) => (a, b),
        None => (0.25 * t_end, t_end),
    };
    if window.1 > t_end {
        return Err(ConfigError(format!("verify.eps_limit_window ends after solver.t_end = {t_end}")).into());
    }
    let mut short = config.clone();
    short.solver.t_end = window.1;
    let (runs, limit) = schedule_runs(&short, true)?;
    let limit = limit.unwrap();
    let tol = config.verify.eps_limit_tol;
    let check = check_eps_to_limit(&runs, &limit, window, tol)?;
    let mut shuffled = runs.clone();
    shuffled.reverse();
    let control = check_eps_to_limit(&shuffled, &limit, window, tol)?;
    Ok(SuiteReport::new("eps-limit", vec![check], vec![control]))
}

pub fn run_suite(name: &str, config: &Config) -> Result<SuiteReport> {
    match name {
        "comparison" => comparison_suite(config, 20),
        "eps-monotone" => eps_monotone_suite(config),
        "expansion" => expansion_suite(config),
        "holder" => holder_suite(config),
        "eps-limit" => eps_limit_suite(config),
        other => bail!("unknown suite {other:?}; expected one of {SUITES:?} or \"all\""),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub config_sha256: String,
    pub suites: Vec<SuiteReport>,
    pub all_pass: bool,
}

/// Runs one suite (or `all`) and writes `report.json`.
pub fn cmd_verify(suite: &str, cfg: &LoadedConfig, out: &Path) -> Result<VerifyReport> {
    prepare(out)?;
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let suites = names.iter().map(|n| run_suite(n, &cfg.config)).collect::<Result<Vec<_>>>()?;
    let all_pass = suites.iter().all(|s| s.all_pass);
    let report = VerifyReport { config_sha256: cfg.sha256.clone(), suites, all_pass };
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalMassReport {
    pub params: ProblemParams,
    pub static_estimate: Option<StaticEstimate>,
    pub static_error: Option<String>,
    pub dynamic_estimate: Option<DynamicEstimate>,
    pub dynamic_error: Option<String>,
    /// `|static - dynamic| / static`.
    pub relative_difference: Option<f64>,
}

pub fn critical_mass(config: &Config) -> Result<CriticalMassReport> {
    let params = config.params()?;
    let section = config.critical_mass.clone().context("missing [critical_mass] section")?;
    let grid = config.grid()?;
    let dyn_params = match section.epsilon {
        Some(e) => params.with_epsilon(Epsilon::Positive(e))?,
        None => params,
    };
    let opts = DynamicOptions {
        grid: grid.clone(),
        config: config.solver()?,
        horizon_doublings: section.horizon_doublings,
        shape: config.shape(&grid)?,
    };
    let static_opts = StaticOptions { steps: section.shoot_steps, ..StaticOptions::default() };
    let (st, dy) = rayon::join(
        || critical_mass_static(&params, section.static_tol, &static_opts),
        || critical_mass_dynamic(&dyn_params, section.m_lo, section.m_hi, section.tol, &opts),
    );
    let relative_difference = match (&st, &dy) {
        (Ok(s), Ok(d)) => Some((s.mass - d.mass).abs() / s.mass),
        _ => None,
    };
    Ok(CriticalMassReport {
        params,
        static_error: st.as_ref().err().map(|e| e.to_string()),
        dynamic_error: dy.as_ref().err().map(|e| e.to_string()),
        static_estimate: st.ok(),
        dynamic_estimate: dy.ok(),
        relative_difference,
    })
}

pub fn cmd_critical_mass(cfg: &LoadedConfig, out: &Path) -> Result<CriticalMassReport> {
    prepare(out)?;
    let report = critical_mass(&cfg.config)?;
    write_json(&out.join("critical_mass.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct MildOracleReport {
    pub smoothing: SmoothingMeasurement,
    pub c_d: f64,
    pub tau: TauChoice,
    pub iterations: usize,
    pub contraction_ratios: Vec<f64>,
    pub e_norm: f64,
    /// `(transformed t, sup |w_mild - w_fd|)` at every mesh time.
    pub gaps: Vec<(f64, f64)>,
    pub max_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Smoothing constant of the backward-Euler semigroup over a fixed family of profiles.
pub fn measure_c_d(grid: &RadialGrid, ball_dim: u32) -> Result<SmoothingMeasurement> {
    let op = RadialHeatOperator::new(grid, ball_dim);
    let mut samples = Vec::new();
    for k in 1..=4 {
        let kf = k as f64;
        samples.push(RadialProfile::from_fn(grid, |r| (std::f64::consts::FRAC_PI_2 * (2.0 * kf - 1.0) * r).cos()));
        samples.push(RadialProfile::from_fn(grid, |r| (1.0 - r) * (1.0 - (kf * r).powi(2)).max(0.0)));
    }
    for s in samples.iter_mut() {
        let mut v = s.values().to_vec();
        *v.last_mut().unwrap() = 0.0;
        *s = RadialProfile::new(grid.clone(), v)?;
    }
    let times: Vec<f64> = (0..=24).map(|k| 1e-5 * 10f64.powf(k as f64 / 6.0)).collect();
    Ok(measure_smoothing(&op, &samples, &times, 10)?)
}

pub fn mild_oracle(config: &Config) -> Result<MildOracleReport> {
    let params = config.params()?;
    if params.epsilon.is_limit() {
        bail!("the mild oracle needs problem.epsilon > 0");
    }
    let grid = config.grid()?;
    let section = config.mild.clone().unwrap_or_default();
    let u0 = config.initial_profile()?;
    let big_w0 = theta0(&u0)?.lift_removed();
    let smoothing = measure_c_d(&grid, params.ball_dim())?;
    let c_d = section.c_d.unwrap_or_else(|| smoothing.constant());
    let mut tau = select_tau(&params, c_d, big_w0.sup_norm(), 1.0)?;
    if let Some(t) = section.tau {
        let (beta2, beta3) = degen_core::mild::beta_constants(&params, c_d, tau.k, t)?;
        let invariance = degen_core::mild::invariance_bound(&params, c_d, tau.k, t)?;
        tau = TauChoice { tau: t, beta2, beta3, invariance, ..tau };
    }
    let basis = EigenBasis::new(&grid, params.ball_dim(), section.modes)?;
    let opts = DuhamelOptions { modes: section.modes, steps: section.steps, max_iter: section.max_iter, tol: section.tol };
    let mild = duhamel_fixed_point(&basis, &big_w0, &params, tau.tau, &opts)?;

    let n2 = params.n() * params.n();
    let mut solver = config.solver()?;
    solver.t_end = n2 * tau.tau;
    solver.output_interval = solver.t_end / section.steps as f64;
    solver.convergence_tol = 0.0;
    let fd = run(&u0, &solver, &params)?;
    let lifted = mild.lifted(params.mass);
    let mut gaps = Vec::new();
    let mut sup_w: f64 = 0.0;
    for (t, w) in mild.times.iter().zip(&lifted) {
        let f = fd.frame_at(n2 * t).with_context(|| format!("finite-difference run lacks t = {}", n2 * t))?;
        gaps.push((*t, w.sup_distance(&f.w)?));
        sup_w = sup_w.max(f.sup_w);
    }
    let max_gap = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
    let tolerance = 5e-3 * (1.0 + sup_w);
    Ok(MildOracleReport {
        smoothing,
        c_d,
        tau,
        iterations: mild.iterations,
        contraction_ratios: mild.contraction_ratios.clone(),
        e_norm: mild.e_norm,
        gaps,
        max_gap,
        tolerance,
        pass: max_gap <= tolerance && mild.max_contraction_ratio() < 1.0,
    })
}

pub fn cmd_mild_oracle(cfg: &LoadedConfig, out: &Path) -> Result<MildOracleReport> {
    prepare(out)?;
    let report = mild_oracle(&cfg.config)?;
    write_json(&out.join("mild_oracle.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyReport {
    pub a: f64,
    pub m_of_a: f64,
    pub monotone: bool,
    pub support_edge: Option<f64>,
    pub clamp_events: u64,
}

/// Shoots for the steady state of the configured mass; writes `steady.csv` (`x,u,u_x`) and
/// `steady.json`.
pub fn cmd_steady_state(cfg: &LoadedConfig, out: &Path) -> Result<SteadyReport> {
    prepare(out)?;
    let params = cfg.config.params()?.with_epsilon(Epsilon::Limit)?;
    let section = cfg.config.steady.clone().context("missing [steady] section")?;
    let rec = steady_state(&params, section.a_max, section.steps)?;
    let u = rec.steady_profile(params.dim)?;
    let x = u.x_nodes();
    let mut csv = String::from("x,u,u_x\n");
    for ((x, u), ux) in x.iter().zip(u.values()).zip(&rec.u_x) {
        csv.push_str(&format!("{x},{u},{ux}\n"));
    }
    write_atomic(&out.join("steady.csv"), csv.as_bytes())?;
    let report = SteadyReport {
        a: rec.a,
        m_of_a: rec.m_of_a,
        monotone: rec.monotone,
        support_edge: rec.support_edge,
        clamp_events: rec.clamp_events,
    };
    write_json(&out.join("steady.json"), &report)?;
    Ok(report)
}
