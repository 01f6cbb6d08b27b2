//! Run configuration and its flat `key = value` text format.
//!
//! ```text
//! # comment
//! problem = double_integrator
//! particles = 256
//! initial_state = 1.0, -0.5
//! lambda = search
//! ```
//!
//! Vectors are comma separated. Unknown keys are rejected.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::backward::Lambda;
use crate::error::{Error, Result};
use crate::problem::{
    BoxRegion, ControlProblem, DoubleIntegratorL1, LinearQuadratic, PendulumL1, TimeGrid,
    UncontrolledDiffusion,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    DoubleIntegrator,
    Pendulum,
    LinearQuadratic,
    Diffusion,
}

impl ProblemKind {
    fn default_dt(self) -> f64 {
        match self {
            ProblemKind::DoubleIntegrator | ProblemKind::LinearQuadratic => 0.1,
            ProblemKind::Pendulum | ProblemKind::Diffusion => 0.05,
        }
    }

    fn default_horizon(self) -> f64 {
        match self {
            ProblemKind::Diffusion => 1.0,
            _ => 3.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::DoubleIntegrator => "double_integrator",
            ProblemKind::Pendulum => "pendulum",
            ProblemKind::LinearQuadratic => "linear_quadratic",
            ProblemKind::Diffusion => "diffusion",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "double_integrator" => ProblemKind::DoubleIntegrator,
            "pendulum" => ProblemKind::Pendulum,
            "linear_quadratic" | "lq" => ProblemKind::LinearQuadratic,
            "diffusion" => ProblemKind::Diffusion,
            other => return Err(Error::Config(format!("unknown problem `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Fbrrt,
    /// Independent chains regrown from scratch each iteration, uniform path weights.
    ParallelBaseline,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Fbrrt => "fbrrt",
            Mode::ParallelBaseline => "parallel-baseline",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fbrrt" => Ok(Mode::Fbrrt),
            "parallel-baseline" | "parallel_baseline" | "baseline" => Ok(Mode::ParallelBaseline),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// Temperature choice: one fixed setting, or a search over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSetting {
    Fixed(Lambda),
    Search(Vec<Lambda>),
}

fn parse_lambda(s: &str) -> Result<Lambda> {
    let bad = || Error::Config(format!("bad lambda `{s}`"));
    if s == "uniform" || s == "inf" {
        return Ok(Lambda::Uniform);
    }
    let (kind, value) = match s.strip_prefix("iqr:") {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let v: f64 = value.trim().parse().map_err(|_| bad())?;
    if !(v.is_finite() && v > 0.0) {
        return Err(bad());
    }
    Ok(if kind {
        Lambda::IqrScaled(v)
    } else {
        Lambda::Fixed(v)
    })
}

fn lambda_text(l: &Lambda) -> String {
    match l {
        Lambda::Fixed(v) => format!("{v}"),
        Lambda::IqrScaled(v) => format!("iqr:{v}"),
        Lambda::Uniform => "uniform".into(),
    }
}

impl FromStr for LambdaSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "search" {
            return Ok(LambdaSetting::Search(crate::backward::default_lambda_grid()));
        }
        if let Some(list) = s.strip_prefix("search:") {
            let grid = list
                .split(';')
                .map(|x| parse_lambda(x.trim()))
                .collect::<Result<Vec<_>>>()?;
            return Ok(LambdaSetting::Search(grid));
        }
        parse_lambda(s).map(LambdaSetting::Fixed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub problem: ProblemKind,
    pub fuel_weight: Option<f64>,
    pub noise: Option<f64>,
    pub terminal_weight: Option<Vec<f64>>,
    pub gravity_ratio: Option<f64>,
    pub damping: Option<f64>,
    pub horizon: Option<f64>,
    pub initial_state: Option<Vec<f64>>,
    pub roi_lower: Option<Vec<f64>>,
    pub roi_upper: Option<Vec<f64>>,
    /// Time steps `N`; defaults to the problem's usual `Δt`.
    pub steps: Option<usize>,
    /// Layer width `M`.
    pub particles: usize,
    pub iterations: usize,
    /// Number of layer-0 nodes. Extra roots are drawn uniformly in the roi.
    pub roots: usize,
    pub eps_rrt_first: f64,
    pub eps_rrt: f64,
    pub eps_opt: f64,
    pub keep_fraction: f64,
    pub lambda: LambdaSetting,
    /// Defaults to `1e-8 · M`.
    pub ridge: Option<f64>,
    pub rollout_count: usize,
    pub seed: u64,
    pub mode: Mode,
    pub metric_weights: Option<Vec<f64>>,
    pub run_id: String,
    pub out_dir: Option<String>,
    pub compare_states: usize,
    pub compare_seeds: usize,
    pub compare_state_lower: Option<Vec<f64>>,
    pub compare_state_upper: Option<Vec<f64>>,
    pub compare_buckets: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            problem: ProblemKind::DoubleIntegrator,
            fuel_weight: None,
            noise: None,
            terminal_weight: None,
            gravity_ratio: None,
            damping: None,
            horizon: None,
            initial_state: None,
            roi_lower: None,
            roi_upper: None,
            steps: None,
            particles: 512,
            iterations: 10,
            roots: 1,
            eps_rrt_first: 1.0,
            eps_rrt: 0.7,
            eps_opt: 0.7,
            keep_fraction: 0.3,
            lambda: LambdaSetting::Fixed(Lambda::IqrScaled(1.0)),
            ridge: None,
            rollout_count: 256,
            seed: 0,
            mode: Mode::Fbrrt,
            metric_weights: None,
            run_id: "run".into(),
            out_dir: None,
            compare_states: 10,
            compare_seeds: 5,
            compare_state_lower: None,
            compare_state_upper: None,
            compare_buckets: 10,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn vector(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| num(key, v.trim())).collect()
}

fn opt_text<T: std::fmt::Display>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(|x| x.to_string())
}

fn vec_text(v: &Option<Vec<f64>>) -> Option<String> {
    v.as_ref()
        .map(|xs| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(", "))
}

impl SolverConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = SolverConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            config
                .set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(config)
    }

    /// Applies one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "problem" => self.problem = value.parse()?,
            "fuel_weight" => self.fuel_weight = Some(num(key, value)?),
            "noise" => self.noise = Some(num(key, value)?),
            "terminal_weight" => self.terminal_weight = Some(vector(key, value)?),
            "gravity_ratio" => self.gravity_ratio = Some(num(key, value)?),
            "damping" => self.damping = Some(num(key, value)?),
            "horizon" => self.horizon = Some(num(key, value)?),
            "initial_state" => self.initial_state = Some(vector(key, value)?),
            "roi_lower" => self.roi_lower = Some(vector(key, value)?),
            "roi_upper" => self.roi_upper = Some(vector(key, value)?),
            "steps" => self.steps = Some(num(key, value)?),
            "particles" => self.particles = num(key, value)?,
            "iterations" => self.iterations = num(key, value)?,
            "roots" => self.roots = num(key, value)?,
            "eps_rrt_first" => self.eps_rrt_first = num(key, value)?,
            "eps_rrt" => self.eps_rrt = num(key, value)?,
            "eps_opt" => self.eps_opt = num(key, value)?,
            "keep_fraction" => self.keep_fraction = num(key, value)?,
            "lambda" => self.lambda = value.parse()?,
            "ridge" => self.ridge = Some(num(key, value)?),
            "rollout_count" => self.rollout_count = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "mode" => self.mode = value.parse()?,
            "metric_weights" => self.metric_weights = Some(vector(key, value)?),
            "run_id" => self.run_id = value.to_string(),
            "out_dir" => self.out_dir = Some(value.to_string()),
            "compare_states" => self.compare_states = num(key, value)?,
            "compare_seeds" => self.compare_seeds = num(key, value)?,
            "compare_state_lower" => self.compare_state_lower = Some(vector(key, value)?),
            "compare_state_upper" => self.compare_state_upper = Some(vector(key, value)?),
            "compare_buckets" => self.compare_buckets = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Canonical text form; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let lambda = match &self.lambda {
            LambdaSetting::Fixed(l) => lambda_text(l),
            LambdaSetting::Search(grid) => format!(
                "search:{}",
                grid.iter().map(lambda_text).collect::<Vec<_>>().join(";")
            ),
        };
        let entries: Vec<(&str, Option<String>)> = vec![
            ("problem", Some(self.problem.as_str().into())),
            ("fuel_weight", opt_text(&self.fuel_weight)),
            ("noise", opt_text(&self.noise)),
            ("terminal_weight", vec_text(&self.terminal_weight)),
            ("gravity_ratio", opt_text(&self.gravity_ratio)),
            ("damping", opt_text(&self.damping)),
            ("horizon", opt_text(&self.horizon)),
            ("initial_state", vec_text(&self.initial_state)),
            ("roi_lower", vec_text(&self.roi_lower)),
            ("roi_upper", vec_text(&self.roi_upper)),
            ("steps", opt_text(&self.steps)),
            ("particles", Some(self.particles.to_string())),
            ("iterations", Some(self.iterations.to_string())),
            ("roots", Some(self.roots.to_string())),
            ("eps_rrt_first", Some(self.eps_rrt_first.to_string())),
            ("eps_rrt", Some(self.eps_rrt.to_string())),
            ("eps_opt", Some(self.eps_opt.to_string())),
            ("keep_fraction", Some(self.keep_fraction.to_string())),
            ("lambda", Some(lambda)),
            ("ridge", opt_text(&self.ridge)),
            ("rollout_count", Some(self.rollout_count.to_string())),
            ("seed", Some(self.seed.to_string())),
            ("mode", Some(self.mode.as_str().into())),
            ("metric_weights", vec_text(&self.metric_weights)),
            ("run_id", Some(self.run_id.clone())),
            ("out_dir", self.out_dir.clone()),
            ("compare_states", Some(self.compare_states.to_string())),
            ("compare_seeds", Some(self.compare_seeds.to_string())),
            ("compare_state_lower", vec_text(&self.compare_state_lower)),
            ("compare_state_upper", vec_text(&self.compare_state_upper)),
            ("compare_buckets", Some(self.compare_buckets.to_string())),
        ];
        let mut out = String::new();
        for (k, v) in entries {
            if let Some(v) = v {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("eps_rrt_first", self.eps_rrt_first),
            ("eps_rrt", self.eps_rrt),
            ("eps_opt", self.eps_opt),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, format!("must lie in [0, 1], got {p}")));
            }
        }
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return Err(Error::param("keep_fraction", "must lie in (0, 1]"));
        }
        if self.iterations == 0 {
            return Err(Error::param("iterations", "must be at least 1"));
        }
        if self.particles < 2 {
            return Err(Error::param("particles", "must be at least 2"));
        }
        if self.roots == 0 {
            return Err(Error::param("roots", "must be at least 1"));
        }
        if self.rollout_count == 0 {
            return Err(Error::param("rollout_count", "must be at least 1"));
        }
        if self.steps == Some(0) {
            return Err(Error::param("steps", "must be at least 1"));
        }
        if let Some(r) = self.ridge {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::param("ridge", "must be finite and >= 0"));
            }
        }
        if let LambdaSetting::Search(grid) = &self.lambda {
            if grid.is_empty() {
                return Err(Error::param("lambda", "search grid must not be empty"));
            }
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(self.problem.default_horizon())
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        let horizon = self.horizon();
        let steps = self
            .steps
            .unwrap_or_else(|| (horizon / self.problem.default_dt()).round().max(1.0) as usize);
        TimeGrid::new(horizon, steps)
    }

    pub fn ridge(&self) -> f64 {
        self.ridge.unwrap_or(1e-8 * self.particles as f64)
    }

    fn roi_override(&self, default: BoxRegion) -> Result<BoxRegion> {
        match (&self.roi_lower, &self.roi_upper) {
            (None, None) => Ok(default),
            (lo, hi) => BoxRegion::new(
                lo.clone().unwrap_or(default.lower),
                hi.clone().unwrap_or(default.upper),
            ),
        }
    }

    fn pair(&self, name: &str, v: &Option<Vec<f64>>, default: [f64; 2]) -> Result<[f64; 2]> {
        match v {
            None => Ok(default),
            Some(xs) if xs.len() == 2 => Ok([xs[0], xs[1]]),
            Some(xs) => Err(Error::Config(format!(
                "`{name}` needs 2 entries, got {}",
                xs.len()
            ))),
        }
    }

    pub fn build_problem(&self) -> Result<ControlProblem> {
        self.validate()?;
        let horizon = self.horizon();
        match self.problem {
            ProblemKind::DoubleIntegrator => {
                let d = DoubleIntegratorL1::default();
                DoubleIntegratorL1 {
                    fuel_weight: self.fuel_weight.unwrap_or(d.fuel_weight),
                    noise: self.noise.unwrap_or(d.noise),
                    terminal_weight: self.pair(
                        "terminal_weight",
                        &self.terminal_weight,
                        d.terminal_weight,
                    )?,
                    horizon,
                    initial_state: self.pair(
                        "initial_state",
                        &self.initial_state,
                        d.initial_state,
                    )?,
                    roi: self.roi_override(d.roi.clone())?,
                }
                .build()
            }
            ProblemKind::Pendulum => {
                let d = PendulumL1::default();
                PendulumL1 {
                    fuel_weight: self.fuel_weight.unwrap_or(d.fuel_weight),
                    noise: self.noise.unwrap_or(d.noise),
                    gravity_ratio: self.gravity_ratio.unwrap_or(d.gravity_ratio),
                    damping: self.damping.unwrap_or(d.damping),
                    terminal_weight: self.pair(
                        "terminal_weight",
                        &self.terminal_weight,
                        d.terminal_weight,
                    )?,
                    horizon,
                    initial_state: self.pair(
                        "initial_state",
                        &self.initial_state,
                        d.initial_state,
                    )?,
                    roi: self.roi_override(d.roi.clone())?,
                }
                .build()
            }
            ProblemKind::LinearQuadratic => self.lq_spec()?.build(),
            ProblemKind::Diffusion => {
                let d = UncontrolledDiffusion::default();
                UncontrolledDiffusion {
                    noise: self.noise.unwrap_or(d.noise),
                    terminal_weight: self
                        .terminal_weight
                        .clone()
                        .unwrap_or(d.terminal_weight.clone()),
                    horizon,
                    initial_state: self
                        .initial_state
                        .clone()
                        .unwrap_or(d.initial_state.clone()),
                    roi: self.roi_override(d.roi.clone())?,
                    random_drifts: d.random_drifts.clone(),
                }
                .build()
            }
        }
    }

    /// The LQ instance described by this config (noise defaults to 0.3).
    pub fn lq_spec(&self) -> Result<LinearQuadratic> {
        let mut spec = LinearQuadratic::double_integrator(self.noise.unwrap_or(0.3));
        spec.horizon = self.horizon();
        if let Some(x0) = &self.initial_state {
            spec.initial_state = DVector::from_column_slice(x0);
        }
        if let Some(q) = &self.terminal_weight {
            spec.terminal_cost = DMatrix::from_diagonal(&DVector::from_column_slice(q));
        }
        spec.roi = self.roi_override(spec.roi.clone())?;
        Ok(spec)
    }
}
