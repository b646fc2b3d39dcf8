//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits non-zero when a
//! criterion fails for a reason other than a documented defect.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use degen::commands::{cmd_solve, critical_mass, mild_oracle};
use degen::config::Config;
use degen_core::evolve::{pullback_frame, pullback_trajectory, run, run_schedule, DtPolicy};
use degen_core::heat::RadialHeatOperator;
use degen_core::quad::singular_beta_integral;
use degen_core::verify::{check_comparison, check_eps_monotone, check_eps_to_limit, check_expansion, default_slack, CheckStatus};
use degen_core::{Epsilon, Exponent, MassProfile, ProblemParams, RadialGrid, RadialProfile, SolverConfig, Status, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
    /// Set when the failure is the analysed, expected one.
    known_defect: Option<String>,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Verdict { pass, detail, known_defect: None }
    }
}

/// Every trajectory produced along the way, for the bounds criterion.
#[derive(Default)]
struct Runs {
    all: Vec<Trajectory>,
}

fn fixed(dt: f64, t_end: f64, output_interval: f64) -> SolverConfig {
    SolverConfig { dt: DtPolicy::Fixed { dt }, t_end, output_interval, convergence_tol: 0.0, ..SolverConfig::default() }
}

fn params(dim: u32, q: (u32, u32), m: f64, eps: Epsilon) -> ProblemParams {
    ProblemParams::new(dim, Exponent::rational(q.0, q.1), m, eps).unwrap()
}

// J_1 from its integral representation; the integrand is periodic so the trapezoidal rule
// converges geometrically.
fn bessel_j1(x: f64) -> f64 {
    let n = 400;
    let h = PI / n as f64;
    let mut s = 0.5 * ((0.0f64).cos() + (PI - x * PI.sin()).cos());
    for k in 1..n {
        let t = k as f64 * h;
        s += (t - x * t.sin()).cos();
    }
    s * h / PI
}

fn first_j1_zero() -> f64 {
    let (mut a, mut b) = (3.0, 4.5);
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if bessel_j1(a) * bessel_j1(c) <= 0.0 {
            b = c;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let j = first_j1_zero();
    let lambda = j * j;
    let grid = RadialGrid::uniform(511).unwrap();
    let op = RadialHeatOperator::new(&grid, 4);
    let mut phi: Vec<f64> = grid.nodes().iter().map(|&r| if r == 0.0 { 0.5 * j } else { bessel_j1(j * r) / r }).collect();
    *phi.last_mut().unwrap() = 0.0;
    let mut w = RadialProfile::new(grid.clone(), phi).unwrap();
    let dt = 1e-4;
    let (t1, t2) = (0.01, 0.05);
    let (n1, n2) = ((t1 / dt) as usize, (t2 / dt) as usize);
    let mut s1 = 0.0;
    for k in 1..=n2 {
        w = op.heat_step(&w, dt).unwrap();
        if k == n1 {
            s1 = w.sup_norm();
        }
    }
    let rate = (s1 / w.sup_norm()).ln() / (t2 - t1);
    let rel = (rate - lambda).abs() / lambda;
    let elapsed = start.elapsed();
    Verdict::new(
        rel <= 5e-3 && (j - 3.83171).abs() < 1e-5 && elapsed < Duration::from_secs(5),
        format!("j11 = {j:.6}, decay rate {rate:.5} vs lambda1 {lambda:.5} (rel {rel:.2e}), {elapsed:.2?}"),
    )
}

fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let (mut cp, mut dp) = (vec![0.0; n], vec![0.0; n]);
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / den;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Direct solve of `u_t = x^(2-2/N) u_xx + u ((u_x + eps)^q - eps^q)` on the given x-nodes,
/// backward Euler in the diffusion and explicit in the reaction.
#[allow(clippy::too_many_arguments)]
fn direct_x_solve(x: &[f64], u0: &[f64], dim: u32, q: f64, eps: f64, m: f64, dt: f64, t_end: f64) -> Vec<f64> {
    let n = dim as f64;
    let len = x.len();
    let inner = len - 2;
    let mut u = u0.to_vec();
    let steps = (t_end / dt).round() as usize;
    let power = |s: f64| {
        assert!(s > -0.5 * eps, "u_x = {s} left the domain of the test nonlinearity");
        (s + eps).powf(q) - eps.powf(q)
    };
    for _ in 0..steps {
        let (mut a, mut b, mut c, mut d) = (vec![0.0; inner], vec![0.0; inner], vec![0.0; inner], vec![0.0; inner]);
        for j in 1..len - 1 {
            let (hm, hp) = (x[j] - x[j - 1], x[j + 1] - x[j]);
            let ux = (hm * hm * u[j + 1] - hp * hp * u[j - 1] + (hp * hp - hm * hm) * u[j]) / (hm * hp * (hm + hp));
            let k = dt * x[j].powf(2.0 - 2.0 / n) * 2.0 / (hm + hp);
            let i = j - 1;
            a[i] = -k / hm;
            c[i] = -k / hp;
            b[i] = 1.0 + k / hm + k / hp;
            d[i] = u[j] + dt * u[j] * power(ux);
        }
        d[inner - 1] -= c[inner - 1] * m;
        c[inner - 1] = 0.0;
        a[0] = 0.0;
        let v = thomas(&a, &b, &c, &d);
        u[1..len - 1].copy_from_slice(&v);
        u[0] = 0.0;
        u[len - 1] = m;
    }
    u
}

fn criterion_2(runs: &mut Runs) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (dim, q) in [(2u32, (1u32, 2u32)), (3, (2, 3))] {
        let (m, eps, dt, t) = (0.5, 0.05, 1e-4, 0.1);
        let p = params(dim, q, m, Epsilon::Positive(eps));
        let grid = RadialGrid::uniform(200).unwrap();
        let n = dim as f64;
        let u0 = MassProfile::from_fn(&grid, dim, |x| m * x * (2.0 - x.powf(2.0 / n))).unwrap();
        let traj = run(&u0, &fixed(dt, t, t), &p).unwrap();
        let frame = traj.frame_at(t).expect("frame at t = 0.1");
        let pulled = pullback_frame(frame, &p).unwrap();
        let direct = direct_x_solve(&pulled.x, u0.values(), dim, p.q(), eps, m, dt, t);
        let err = pulled.u.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let h = pulled.x.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let sup_u = direct.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let tol = 10.0 * (h * h + dt) * sup_u;
        let moved = direct.iter().zip(u0.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pass &= err <= tol;
        detail.push(format!("N={dim}: err {err:.2e} <= {tol:.2e} (|u - u0| up to {moved:.2e})"));
        runs.all.push(traj);
    }
    Verdict::new(pass, detail.join("; "))
}

fn criterion_3(runs: &mut Runs) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    // the worked example first
    let tau_ex = 1.0 / (2.0 * 0.5 * 4.0 * 1.0);
    let bound_ex = 2f64.powf(1.0 / 0.5);
    pass &= tau_ex == 0.25 && bound_ex == 4.0;
    detail.push(format!("example tau {tau_ex} bound {bound_ex}"));
    let cases = [(2u32, (1u32, 2u32), 1.0, 0.0), (3, (2, 3), 1.0, 1.0), (4, (1, 2), 2.0, 0.5)];
    for (dim, q, m, curvature) in cases {
        for eps in [Epsilon::Positive(0.05), Epsilon::Positive(1e-3), Epsilon::Limit] {
            let p = params(dim, q, m, eps);
            let grid = RadialGrid::uniform(100).unwrap();
            let u0 = MassProfile::from_fn(&grid, dim, |x| m * x * (1.0 + curvature * (1.0 - x))).unwrap();
            let l = (m * (1.0 + curvature)).max(m);
            let qv = p.q();
            let n2 = (dim * dim) as f64;
            let tau = 1.0 / (2.0 * qv * n2 * l.powf(qv));
            let bound = 2f64.powf(1.0 / qv) * l * 1.05;
            let t_native = n2 * tau;
            let traj = run(&u0, &fixed(1e-4, t_native, t_native / 20.0), &p).unwrap();
            let worst = traj.frames.iter().filter(|f| f.t <= t_native * (1.0 + 1e-12)).map(|f| f.sup_w).fold(0.0, f64::max);
            pass &= worst <= bound && traj.status == Status::HorizonReached;
            if eps.is_limit() {
                detail.push(format!("N={dim} L={l}: max|w| {worst:.4} <= {bound:.4} on t <= {tau:.4}"));
            }
            runs.all.push(traj);
        }
    }
    Verdict::new(pass, detail.join("; "))
}

fn criterion_4(runs: &mut Runs) -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let dim = 3;
    let grid = RadialGrid::uniform(64).unwrap();
    let solver = fixed(1e-4, 0.5, 0.05);
    let mut worst: f64 = 0.0;
    let mut passed = 0;
    for k in 0..20 {
        let m2 = rng.random_range(0.3..1.5);
        let eps = Epsilon::Positive(rng.random_range(0.005..0.1));
        let c2: f64 = rng.random_range(-1.0..1.0);
        let hi = MassProfile::from_fn(&grid, dim, |x| m2 * x * (1.0 + c2 * (1.0 - x))).unwrap();
        let lo = if k % 2 == 0 {
            let c1 = rng.random_range(-1.0..c2);
            MassProfile::from_fn(&grid, dim, |x| m2 * x * (1.0 + c1 * (1.0 - x))).unwrap()
        } else {
            hi.scaled(rng.random_range(0.2..1.0))
        };
        let p2 = params(dim, (2, 3), m2, eps);
        let p1 = p2.with_mass(lo.mass()).unwrap();
        let r1 = run(&lo, &solver, &p1).unwrap();
        let r2 = run(&hi, &solver, &p2).unwrap();
        let scale = r1.frames.iter().chain(&r2.frames).map(|f| f.sup_w).fold(0.0, f64::max);
        let slack = default_slack(grid.max_step(), 1e-4, scale);
        let rep = check_comparison(&r1, &r2, slack).unwrap();
        worst = worst.max(rep.metrics["worst_violation"]);
        if rep.passed() {
            passed += 1;
        }
        runs.all.push(r1);
        runs.all.push(r2);
    }
    // controls on a clearly separated same-mass pair
    let p = params(dim, (2, 3), 1.0, Epsilon::Positive(0.05));
    let lo = MassProfile::from_fn(&grid, dim, |x| x * (1.0 - 0.5 * (1.0 - x))).unwrap();
    let hi = MassProfile::from_fn(&grid, dim, |x| x * (1.0 + 0.5 * (1.0 - x))).unwrap();
    let (r1, r2) = (run(&lo, &solver, &p).unwrap(), run(&hi, &solver, &p).unwrap());
    let scale = r1.frames.iter().chain(&r2.frames).map(|f| f.sup_w).fold(0.0, f64::max);
    let slack = default_slack(grid.max_step(), 1e-4, scale);
    let swapped = check_comparison(&r2, &r1, slack).unwrap();
    let mut broken = r2.clone();
    let last = broken.frames.last_mut().unwrap();
    let mut v = last.w.values().to_vec();
    let mid = v.len() / 2;
    v[mid] = -1.0;
    last.w = RadialProfile::new(grid.clone(), v).unwrap();
    let corrupted = check_comparison(&r1, &broken, slack).unwrap();
    let swapped_at_zero = swapped.status == CheckStatus::Fail && swapped.metrics["worst_t"] == 0.0;
    let elapsed = start.elapsed();
    Verdict::new(
        passed == 20 && swapped_at_zero && corrupted.status == CheckStatus::Fail && elapsed < Duration::from_secs(120),
        format!(
            "{passed}/20 ordered pairs hold (worst violation {worst:.1e}); swapped control {:?} at t = {}, corrupted control {:?}; {elapsed:.1?}",
            swapped.status, swapped.metrics["worst_t"], corrupted.status
        ),
    )
}

fn criterion_5(runs: &mut Runs) -> Verdict {
    let grid = RadialGrid::uniform(64).unwrap();
    let p = params(3, (2, 3), 0.5, Epsilon::Limit);
    let u0 = MassProfile::from_fn(&grid, 3, |x| 0.5 * x).unwrap();
    let mut solver = fixed(1e-4, 0.2, 0.01);
    solver.epsilon_schedule = vec![0.1, 0.03, 0.01, 0.003];
    let sched = run_schedule(&u0, &solver, &p.with_epsilon(Epsilon::Positive(0.1)).unwrap()).unwrap();
    let limit = run(&u0, &solver, &p).unwrap();
    let scale = sched.iter().flat_map(|t| &t.frames).map(|f| f.sup_w).fold(0.0, f64::max);
    let mono = check_eps_monotone(&sched, default_slack(grid.max_step(), 1e-4, scale)).unwrap();
    let conv = check_eps_to_limit(&sched, &limit, (0.05, 0.2), 1e-2).unwrap();
    let gaps: Vec<String> = conv.table.iter().map(|r| format!("{}:{:.1e}/{:.1e}", r[0], r[1], r[2])).collect();
    let v = Verdict::new(
        mono.passed() && conv.passed(),
        format!(
            "chain {:?} (worst {:.1e}); gaps eps:u/u_x {}; final u_x gap {:.2e} vs {:.2e}",
            mono.status,
            mono.metrics["worst_violation"],
            gaps.join(" "),
            conv.metrics["final_gap_u_x"],
            1e-2 * conv.metrics["u_x_scale"]
        ),
    );
    runs.all.extend(sched);
    runs.all.push(limit);
    v
}

fn criterion_7(runs: &mut Runs) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (dim, q) in [(2u32, (1u32, 2u32)), (3, (2, 3)), (4, (1, 2))] {
        let p = params(dim, q, 0.5, Epsilon::Positive(0.05));
        let grid = RadialGrid::uniform(64).unwrap();
        let u0 = MassProfile::from_fn(&grid, dim, |x| 0.5 * x).unwrap();
        let traj = run(&u0, &fixed(1e-4, 4.0, 0.1), &p).unwrap();
        let frame = &traj.frames[traj.frames.len() / 2];
        let pulled = pullback_frame(frame, &p).unwrap();
        let rep = check_expansion(&pulled.x, &pulled.u_x, dim, 8).unwrap();
        pass &= rep.passed();
        detail.push(format!(
            "N={dim} t={}: slope {:.3} (target {:.3}), odd/even {:.3}",
            frame.t,
            rep.metrics["slope"],
            2.0 / dim as f64,
            rep.metrics["odd_ratio"]
        ));
        runs.all.push(traj);
    }
    Verdict::new(pass, detail.join("; "))
}

fn criterion_6(runs: &Runs) -> Verdict {
    let mut min_ux = f64::INFINITY;
    let mut worst_low = f64::INFINITY;
    let mut worst_high = f64::NEG_INFINITY;
    let mut eps_runs = 0;
    let mut extensions = 0;
    let mut limit_clamps = 0;
    let mut limit_runs = 0;
    for traj in &runs.all {
        if traj.params.epsilon.is_limit() {
            limit_runs += 1;
            limit_clamps += traj.counters.clamp_events;
            continue;
        }
        eps_runs += 1;
        extensions += traj.counters.extension_events;
        let m = traj.params.mass;
        for f in pullback_trajectory(traj).unwrap() {
            if f.t > 0.0 {
                min_ux = f.u_x.iter().copied().fold(min_ux, f64::min);
            }
            worst_low = f.u.iter().copied().fold(worst_low, f64::min);
            worst_high = f.u.iter().map(|u| u - m).fold(worst_high, f64::max);
        }
    }
    Verdict::new(
        min_ux > -1e-10 && worst_low >= -1e-12 && worst_high <= 1e-12 && limit_clamps == 0 && limit_runs > 0,
        format!(
            "{eps_runs} eps runs: min u_x {min_ux:.2e}, min u {worst_low:.1e}, max u - m {worst_high:.1e}, {extensions} evaluations below -eps/2; {limit_runs} limit runs, {limit_clamps} clamps"
        ),
    )
}

const CRITICAL_N3: &str = r#"
[problem]
dim = 3
q = "2/3"
mass = 1.0
epsilon = "limit"

[grid]
intervals = 64

[solver]
dt = 0.05
dt_policy = "adaptive"
t_end = 150.0
output_interval = 1.0
blow_threshold = 100.0

[critical_mass]
m_lo = 0.5
m_hi = 2.0
tol = 0.05
epsilon = 1e-3
horizon_doublings = 1
"#;

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut pass = true;
    let mut n3_pass = false;

    let n3 = critical_mass(&Config::parse(CRITICAL_N3).unwrap().config).unwrap();
    match (&n3.static_estimate, &n3.dynamic_estimate) {
        (Some(s), Some(d)) => {
            let rel = n3.relative_difference.unwrap();
            let below_ok = d.probes.iter().filter(|p| p.mass < d.bracket.0 + 1e-12).all(|p| p.status == Status::Converged);
            let above_ok = d.probes.iter().filter(|p| p.mass > d.bracket.1 - 1e-12).all(|p| p.status == Status::BlownUp);
            // threshold 100 is at least 10x N[u0] = m for every probed m <= 2
            n3_pass = rel <= 0.05 && d.monotone && below_ok && above_ok && d.inconclusive_at.is_none();
            pass &= n3_pass;
            detail.push(format!(
                "(3,2/3): static {:.4} dynamic {:.4} in [{:.4}, {:.4}] rel {rel:.3}, {} probes",
                s.mass,
                d.mass,
                d.bracket.0,
                d.bracket.1,
                d.probes.len()
            ));
        }
        _ => {
            pass = false;
            detail.push(format!("(3,2/3): static {:?} dynamic {:?}", n3.static_error, n3.dynamic_error));
        }
    }

    let n2_text = CRITICAL_N3.replace("dim = 3", "dim = 2").replace("q = \"2/3\"", "q = \"1/2\"");
    let n2 = critical_mass(&Config::parse(&n2_text).unwrap().config).unwrap();
    let n2_pass = n2.relative_difference.is_some_and(|r| r <= 0.05);
    pass &= n2_pass;
    detail.push(format!(
        "(2,1/2): static {} / dynamic {}",
        n2.static_estimate.as_ref().map_or_else(|| n2.static_error.clone().unwrap_or_default(), |s| format!("{:.4}", s.mass)),
        n2.dynamic_estimate.as_ref().map_or_else(|| n2.dynamic_error.clone().unwrap_or_default(), |d| format!("{:.4}", d.mass)),
    ));
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(600);
    detail.push(format!("{elapsed:.1?}"));

    let mut v = Verdict::new(pass, detail.join("; "));
    // q = 1/2 < 2/N = 1 is subcritical: the shooting map increases without bound and every
    // mass converges, so there is no threshold to agree on.
    let subcritical_defect = !n2_pass
        && n2.static_error.as_deref().is_some_and(|e| e.starts_with("inconclusive"))
        && n2.dynamic_error.as_deref().is_some_and(|e| e.starts_with("invalid bracket"));
    if subcritical_defect && n3_pass && elapsed < Duration::from_secs(600) {
        v.known_defect = Some("no critical mass exists for (N, q) = (2, 1/2)".into());
    }
    v
}

const MILD_N2: &str = r#"
[problem]
dim = 2
q = "1/2"
mass = 0.5
epsilon = 0.05

[grid]
intervals = 128

[solver]
dt = 1e-5
t_end = 0.1
output_interval = 0.01

[mild]
modes = 40
steps = 100
"#;

fn criterion_9() -> Verdict {
    let i = singular_beta_integral(0.5, 0.5).unwrap();
    let mut pass = (i - PI).abs() <= 1e-8;
    let mut detail = vec![format!("I(1/2,1/2) - pi = {:.1e}", i - PI)];
    for text in [MILD_N2.to_string(), MILD_N2.replace("dim = 2", "dim = 3").replace("q = \"1/2\"", "q = \"2/3\"")] {
        let cfg = Config::parse(&text).unwrap();
        let r = mild_oracle(&cfg.config).unwrap();
        let ratio = r.contraction_ratios.iter().copied().fold(0.0, f64::max);
        pass &= r.pass && ratio < 1.0 && r.tau.beta2 <= 0.5 && r.tau.beta3 <= 0.5;
        detail.push(format!(
            "N={}: tau {:.2e} (beta2 {:.2}, beta3 {:.2}), max ratio {ratio:.1e}, gap {:.1e} <= {:.1e}",
            cfg.config.problem.dim, r.tau.tau, r.tau.beta2, r.tau.beta3, r.max_gap, r.tolerance
        ));
    }
    Verdict::new(pass, detail.join("; "))
}

const SOLVE_N3: &str = r#"
[problem]
dim = 3
q = "2/3"
mass = 1.5
epsilon = 0.01

[grid]
intervals = 64

[solver]
dt = 0.01
dt_policy = "adaptive"
t_end = 2.0
output_interval = 0.1
"#;

fn criterion_10() -> Verdict {
    let cfg = Config::parse(SOLVE_N3).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        cmd_solve(&cfg, d.path()).unwrap();
    }
    let mut same = true;
    let mut bytes = 0;
    for name in ["frames.csv", "diagnostics.csv"] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        same &= a == b;
        bytes += a.len();
    }
    Verdict::new(same, format!("frames.csv and diagnostics.csv identical: {same} ({bytes} bytes)"))
}

fn main() -> ExitCode {
    // `cargo test` forwards harness flags; a bare number selects one criterion.
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let want = |k: u32| only.is_none_or(|o| o == k);
    let mut runs = Runs::default();
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut record = |k: u32, name: &'static str, v: Verdict| {
        println!("criterion {k:>2} {name:<24} {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if let Some(d) = &v.known_defect {
            println!("             known defect: {d}");
        }
        results.push((k, name, v));
    };
    if want(1) {
        record(1, "heat oracle", criterion_1());
    }
    if want(2) || want(6) {
        record(2, "transformation identity", criterion_2(&mut runs));
    }
    if want(3) || want(6) {
        record(3, "supersolution bound", criterion_3(&mut runs));
    }
    if want(4) || want(6) {
        record(4, "comparison suite", criterion_4(&mut runs));
    }
    if want(5) || want(6) {
        record(5, "eps monotone/limit", criterion_5(&mut runs));
    }
    if want(7) || want(6) {
        record(7, "expansion fit", criterion_7(&mut runs));
    }
    if want(6) {
        record(6, "positivity and bounds", criterion_6(&runs));
    }
    if want(8) {
        record(8, "critical mass", criterion_8());
    }
    if want(9) {
        record(9, "mild oracle", criterion_9());
    }
    if want(10) {
        record(10, "determinism", criterion_10());
    }
    let unexpected: Vec<u32> = results.iter().filter(|(_, _, v)| !v.pass && v.known_defect.is_none()).map(|r| r.0).collect();
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
