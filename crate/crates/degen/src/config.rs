//! Run configuration: a TOML document with `[problem]`, `[grid]`, `[solver]`, `[initial]`,
//! `[critical_mass]`, `[mild]` and `[steady]` sections.

use std::fmt;
use std::path::Path;

use degen_core::evolve::DtPolicy;
use degen_core::stationary::InitialShape;
use degen_core::transform::density_approximation;
use degen_core::{Epsilon, Exponent, MassProfile, ProblemParams, RadialGrid, SolverConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Malformed or invalid configuration. The CLI exits with code 2 on these.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberOrText {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub dim: u32,
    /// A number or a fraction such as `"2/3"`.
    pub q: NumberOrText,
    pub mass: f64,
    /// A positive number or `"limit"`.
    pub epsilon: NumberOrText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub intervals: usize,
    /// Nodes `(k/M)^power`; absent means uniform.
    #[serde(default)]
    pub graded_power: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtKind {
    Fixed,
    Adaptive,
}

fn default_dt_kind() -> DtKind {
    DtKind::Fixed
}
fn default_blow() -> f64 {
    1e3
}
fn default_conv() -> f64 {
    1e-6
}
fn default_max_steps() -> usize {
    50_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    #[serde(default = "default_dt_kind")]
    pub dt_policy: DtKind,
    pub t_end: f64,
    pub output_interval: f64,
    #[serde(default = "default_blow")]
    pub blow_threshold: f64,
    #[serde(default = "default_conv")]
    pub convergence_tol: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub epsilon_schedule: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum InitialSection {
    /// `u0 = m x`.
    #[default]
    Affine,
    /// `u0 = m x (1 + curvature (1 - x))`, nondecreasing for `|curvature| <= 1`.
    Quadratic { curvature: f64 },
    /// Smoothed staircase with `steps` equal jumps, approximated to within `eta`.
    Staircase { steps: usize, eta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalMassSection {
    pub m_lo: f64,
    pub m_hi: f64,
    /// Absolute bracket width for the dynamic bisection.
    pub tol: f64,
    /// Relative tolerance for the static estimate.
    #[serde(default = "default_static_tol")]
    pub static_tol: f64,
    #[serde(default = "default_doublings")]
    pub horizon_doublings: u32,
    #[serde(default = "default_shoot_steps")]
    pub shoot_steps: usize,
    /// `eps` of the dynamic runs; the static estimate always uses the limit nonlinearity.
    #[serde(default)]
    pub epsilon: Option<f64>,
}

fn default_static_tol() -> f64 {
    1e-3
}
fn default_doublings() -> u32 {
    2
}
fn default_shoot_steps() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MildSection {
    /// Fixed window; selected from the contraction constants when absent.
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_mild_steps")]
    pub steps: usize,
    #[serde(default = "default_iter")]
    pub max_iter: usize,
    #[serde(default = "default_mild_tol")]
    pub tol: f64,
    /// Smoothing constant; measured when absent.
    #[serde(default)]
    pub c_d: Option<f64>,
}

fn default_modes() -> usize {
    40
}
fn default_mild_steps() -> usize {
    100
}
fn default_iter() -> usize {
    60
}
fn default_mild_tol() -> f64 {
    1e-10
}

impl Default for MildSection {
    fn default() -> Self {
        MildSection { tau: None, modes: 40, steps: 100, max_iter: 60, tol: 1e-10, c_d: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadySection {
    pub a_max: f64,
    #[serde(default = "default_shoot_steps")]
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Native-time window of the eps-limit suite; defaults to `[t_end / 4, t_end]`.
    #[serde(default)]
    pub eps_limit_window: Option<[f64; 2]>,
    /// Final `u_x` gap allowed relative to `‖u_x‖∞`.
    #[serde(default = "default_eps_limit_tol")]
    pub eps_limit_tol: f64,
}

fn default_eps_limit_tol() -> f64 {
    1e-2
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection { eps_limit_window: None, eps_limit_tol: default_eps_limit_tol() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub problem: ProblemSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub critical_mass: Option<CriticalMassSection>,
    #[serde(default)]
    pub mild: Option<MildSection>,
    #[serde(default)]
    pub steady: Option<SteadySection>,
    #[serde(default)]
    pub verify: VerifySection,
}

/// A parsed config with its source text and hash.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    pub raw: toml::Table,
    pub sha256: String,
}

fn parse_fraction(text: &str) -> Option<Exponent> {
    let (a, b) = text.split_once('/')?;
    Some(Exponent::rational(a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl Config {
    pub fn parse(text: &str) -> Result<LoadedConfig, ConfigError> {
        let config: Config = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        let raw: toml::Table = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        config.params()?;
        config.grid()?;
        config.solver()?;
        let sha256 = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        Ok(LoadedConfig { config, raw, sha256 })
    }

    pub fn load(path: &Path) -> Result<LoadedConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn params(&self) -> Result<ProblemParams, ConfigError> {
        let p = &self.problem;
        let q = match &p.q {
            NumberOrText::Number(v) => Exponent::Real(*v),
            NumberOrText::Text(t) => parse_fraction(t).ok_or_else(|| ConfigError(format!("problem.q: cannot parse {t:?}")))?,
        };
        let eps = match &p.epsilon {
            NumberOrText::Number(v) => Epsilon::Positive(*v),
            NumberOrText::Text(t) if t == "limit" => Epsilon::Limit,
            NumberOrText::Text(t) => return Err(ConfigError(format!("problem.epsilon: expected a number or \"limit\", got {t:?}"))),
        };
        ProblemParams::new(p.dim, q, p.mass, eps).map_err(|e| ConfigError(format!("problem: {e}")))
    }

    pub fn grid(&self) -> Result<RadialGrid, ConfigError> {
        let g = match self.grid.graded_power {
            None => RadialGrid::uniform(self.grid.intervals),
            Some(p) => RadialGrid::graded(self.grid.intervals, p),
        };
        g.map_err(|e| ConfigError(format!("grid: {e}")))
    }

    pub fn solver(&self) -> Result<SolverConfig, ConfigError> {
        let s = &self.solver;
        let dt = match s.dt_policy {
            DtKind::Fixed => DtPolicy::Fixed { dt: s.dt },
            DtKind::Adaptive => DtPolicy::Adaptive { dt_max: s.dt },
        };
        let cfg = SolverConfig {
            dt,
            blow_threshold: s.blow_threshold,
            convergence_tol: s.convergence_tol,
            t_end: s.t_end,
            output_interval: s.output_interval,
            max_steps: s.max_steps,
            epsilon_schedule: s.epsilon_schedule.clone(),
        };
        cfg.validate().map_err(|e| ConfigError(format!("solver: {e}")))?;
        Ok(cfg)
    }

    /// The initial shape with value 1 at `x = 1`.
    pub fn shape(&self, grid: &RadialGrid) -> Result<InitialShape, ConfigError> {
        let dim = self.problem.dim;
        let err = |e: degen_core::Error| ConfigError(format!("initial: {e}"));
        match self.initial {
            InitialSection::Affine => Ok(InitialShape::Affine),
            InitialSection::Quadratic { curvature } => {
                if curvature.abs() > 1.0 {
                    return Err(ConfigError(format!("initial.curvature = {curvature} must lie in [-1, 1]")));
                }
                let p = MassProfile::from_fn(grid, dim, |x| x * (1.0 + curvature * (1.0 - x))).map_err(err)?;
                Ok(InitialShape::Profile(p))
            }
            InitialSection::Staircase { steps, eta } => {
                if steps == 0 {
                    return Err(ConfigError("initial.steps must be >= 1".into()));
                }
                let n = steps as f64;
                let stair = MassProfile::from_fn(grid, dim, |x| ((x * n).floor() / n).min(1.0)).map_err(err)?;
                let smooth = density_approximation(&stair, eta).map_err(err)?;
                Ok(InitialShape::Profile(smooth))
            }
        }
    }

    pub fn initial_profile(&self) -> Result<MassProfile, ConfigError> {
        let grid = self.grid()?;
        let shape = self.shape(&grid)?;
        shape
            .profile(&grid, self.problem.dim, self.problem.mass)
            .map_err(|e| ConfigError(format!("initial: {e}")))
    }
}
