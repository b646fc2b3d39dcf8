use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use degen::commands::{self, SUITES};
use degen::config::{Config, ConfigError};

#[derive(Parser)]
#[command(name = "degen", version, about = "Radial solver for a degenerate parabolic problem with gradient nonlinearity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for parallel runs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Accepted for reproducibility records; every command is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(clap::Args)]
struct Io {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured problem and write frames, diagnostics and a manifest.
    Solve(Io),
    /// Run a property-check suite and write report.json. Exits 1 unless every check passes.
    Verify {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Static (shooting) and dynamic (bisection) critical-mass estimates.
    CriticalMass(Io),
    /// Compare the evolution against the Duhamel fixed point on a short window.
    MildOracle(Io),
    /// Steady state of the configured mass in the limit problem.
    SteadyState(Io),
}

fn execute(cli: Cli) -> Result<bool> {
    let io = match &cli.command {
        Command::Solve(io) | Command::CriticalMass(io) | Command::MildOracle(io) | Command::SteadyState(io) => io,
        Command::Verify { io, .. } => io,
    };
    let cfg = Config::load(&io.config)?;
    match &cli.command {
        Command::Solve(io) => {
            let traj = commands::cmd_solve(&cfg, &io.out)?;
            println!("{}: {} at t = {}", traj.status.as_str(), traj.stop_reason, traj.final_time);
            Ok(true)
        }
        Command::Verify { io, suite } => {
            if suite != "all" && !SUITES.contains(&suite.as_str()) {
                return Err(ConfigError(format!("unknown suite {suite:?}; expected one of {SUITES:?} or \"all\"")).into());
            }
            let report = commands::cmd_verify(suite, &cfg, &io.out)?;
            for s in &report.suites {
                println!("{:<14} {}", s.suite, if s.all_pass { "PASS" } else { "FAIL" });
            }
            Ok(report.all_pass)
        }
        Command::CriticalMass(io) => {
            let r = commands::cmd_critical_mass(&cfg, &io.out)?;
            match (&r.static_estimate, &r.static_error) {
                (Some(s), _) => println!("static  M = {}", s.mass),
                (None, e) => println!("static  failed: {}", e.as_deref().unwrap_or("")),
            }
            match (&r.dynamic_estimate, &r.dynamic_error) {
                (Some(d), _) => println!("dynamic M = {} in [{}, {}]", d.mass, d.bracket.0, d.bracket.1),
                (None, e) => println!("dynamic failed: {}", e.as_deref().unwrap_or("")),
            }
            if let Some(rel) = r.relative_difference {
                println!("relative difference {rel}");
            }
            Ok(r.static_estimate.is_some() && r.dynamic_estimate.is_some())
        }
        Command::MildOracle(io) => {
            let r = commands::cmd_mild_oracle(&cfg, &io.out)?;
            println!("tau = {} C_D = {} max gap {} (tol {})", r.tau.tau, r.c_d, r.max_gap, r.tolerance);
            Ok(r.pass)
        }
        Command::SteadyState(io) => {
            let r = commands::cmd_steady_state(&cfg, &io.out)?;
            println!("a = {} m(a) = {}", r.a, r.m_of_a);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.seed;
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<ConfigError>()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
