//! Stochastic optimal control problem definitions.
//!
//! A [`ControlProblem`] bundles the controlled SDE `dX = f(t, X, u) dt + σ(t, X) dW`
//! with its running cost `ℓ`, terminal cost `g`, the finite control sets used
//! for policy evaluation and exploration, and the region of interest that
//! bounds RRT target sampling.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type DriftFn = dyn Fn(f64, &DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync;
pub type DiffusionFn = dyn Fn(f64, &DVector<f64>) -> DMatrix<f64> + Send + Sync;
pub type RunningCostFn = dyn Fn(f64, &DVector<f64>, &DVector<f64>) -> f64 + Send + Sync;
pub type TerminalCostFn = dyn Fn(&DVector<f64>) -> f64 + Send + Sync;

/// Axis-aligned box `[lower, upper]` in ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                context: "box bounds",
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::param("box", "zero-dimensional box"));
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::param(
                    "box",
                    format!("dimension {k}: need finite lower < upper, got [{lo}, {hi}]"),
                ));
            }
        }
        Ok(BoxRegion { lower, upper })
    }

    pub fn symmetric(half_widths: &[f64]) -> Result<Self> {
        BoxRegion::new(
            half_widths.iter().map(|h| -h).collect(),
            half_widths.to_vec(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }

    /// Uniform draw; consumes one `f64` per dimension, in dimension order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>()),
        )
    }
}

/// Uniform partition `t_i = i Δt` of `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::param(
                "horizon",
                format!("must be > 0, got {horizon}"),
            ));
        }
        if steps == 0 {
            return Err(Error::param("steps", "must be at least 1"));
        }
        Ok(TimeGrid {
            horizon,
            steps,
            dt: horizon / steps as f64,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn time(&self, i: usize) -> f64 {
        if i == self.steps {
            self.horizon
        } else {
            i as f64 * self.dt
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|i| self.time(i)).collect()
    }
}

/// Raw ingredients of a [`ControlProblem`], validated by [`ControlProblem::new`].
#[derive(Clone)]
pub struct ProblemDefinition {
    pub name: String,
    pub state_dim: usize,
    pub control_dim: usize,
    pub horizon: f64,
    pub drift: Arc<DriftFn>,
    pub diffusion: Arc<DiffusionFn>,
    pub diffusion_inverse: Arc<DiffusionFn>,
    pub running_cost: Arc<RunningCostFn>,
    pub terminal_cost: Arc<TerminalCostFn>,
    pub control_bounds: BoxRegion,
    pub control_candidates: Vec<DVector<f64>>,
    pub random_controls: Vec<DVector<f64>>,
    pub roi: BoxRegion,
    pub initial_state: DVector<f64>,
}

/// An immutable, validated finite-horizon stochastic optimal control problem.
#[derive(Clone)]
pub struct ControlProblem {
    def: ProblemDefinition,
}

impl fmt::Debug for ControlProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlProblem")
            .field("name", &self.def.name)
            .field("state_dim", &self.def.state_dim)
            .field("control_dim", &self.def.control_dim)
            .field("horizon", &self.def.horizon)
            .field("candidates", &self.def.control_candidates.len())
            .field("roi", &self.def.roi)
            .field("initial_state", &self.def.initial_state.as_slice())
            .finish()
    }
}

const INVERSE_TOLERANCE: f64 = 1e-10;

impl ControlProblem {
    pub fn new(def: ProblemDefinition) -> Result<Self> {
        let n = def.state_dim;
        let m = def.control_dim;
        if n == 0 || m == 0 {
            return Err(Error::InvalidProblem(
                "state and control dimensions must be positive".into(),
            ));
        }
        if !(def.horizon.is_finite() && def.horizon > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "horizon must be positive, got {}",
                def.horizon
            )));
        }
        check_dim("roi", n, def.roi.dim())?;
        check_dim("initial state", n, def.initial_state.len())?;
        check_dim("control bounds", m, def.control_bounds.dim())?;
        if def.control_candidates.is_empty() || def.random_controls.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        for u in def.control_candidates.iter().chain(&def.random_controls) {
            check_dim("control", m, u.len())?;
            if !def.control_bounds.contains(u.as_slice()) {
                return Err(Error::InvalidProblem(format!(
                    "control {:?} lies outside the control bounds",
                    u.as_slice()
                )));
            }
        }
        let problem = ControlProblem { def };
        problem.check_diffusion_inverse()?;
        Ok(problem)
    }

    /// Checks `σ⁻¹σ = I` at the roi corners and centre for t ∈ {0, T/2, T}.
    fn check_diffusion_inverse(&self) -> Result<()> {
        let roi = &self.def.roi;
        let n = self.def.state_dim;
        let mut points = vec![DVector::from_iterator(
            n,
            roi.lower
                .iter()
                .zip(&roi.upper)
                .map(|(lo, hi)| 0.5 * (lo + hi)),
        )];
        points.push(DVector::from_column_slice(&roi.lower));
        points.push(DVector::from_column_slice(&roi.upper));
        points.push(self.def.initial_state.clone());
        for t in [0.0, 0.5 * self.def.horizon, self.def.horizon] {
            for x in &points {
                let s = self.diffusion(t, x);
                let s_inv = self.diffusion_inverse(t, x);
                if s.nrows() != n || s.ncols() != n || s_inv.nrows() != n || s_inv.ncols() != n {
                    return Err(Error::InvalidProblem("diffusion must be n x n".into()));
                }
                let err = (&s_inv * &s - DMatrix::identity(n, n)).abs().max();
                if !(err <= INVERSE_TOLERANCE) {
                    return Err(Error::InvalidProblem(format!(
                        "diffusion_inverse * diffusion deviates from identity by {err:e} at t = {t}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.def.name
    }

    pub fn state_dim(&self) -> usize {
        self.def.state_dim
    }

    pub fn control_dim(&self) -> usize {
        self.def.control_dim
    }

    pub fn horizon(&self) -> f64 {
        self.def.horizon
    }

    pub fn drift(&self, t: f64, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        (self.def.drift)(t, x, u)
    }

    pub fn diffusion(&self, t: f64, x: &DVector<f64>) -> DMatrix<f64> {
        (self.def.diffusion)(t, x)
    }

    pub fn diffusion_inverse(&self, t: f64, x: &DVector<f64>) -> DMatrix<f64> {
        (self.def.diffusion_inverse)(t, x)
    }

    pub fn running_cost(&self, t: f64, x: &DVector<f64>, u: &DVector<f64>) -> f64 {
        (self.def.running_cost)(t, x, u)
    }

    pub fn terminal_cost(&self, x: &DVector<f64>) -> f64 {
        (self.def.terminal_cost)(x)
    }

    pub fn control_candidates(&self) -> &[DVector<f64>] {
        &self.def.control_candidates
    }

    pub fn random_controls(&self) -> &[DVector<f64>] {
        &self.def.random_controls
    }

    pub fn control_bounds(&self) -> &BoxRegion {
        &self.def.control_bounds
    }

    pub fn roi(&self) -> &BoxRegion {
        &self.def.roi
    }

    pub fn initial_state(&self) -> &DVector<f64> {
        &self.def.initial_state
    }

    pub fn definition(&self) -> &ProblemDefinition {
        &self.def
    }

    pub fn with_initial_state(&self, x0: DVector<f64>) -> Result<Self> {
        check_dim("initial state", self.def.state_dim, x0.len())?;
        let mut def = self.def.clone();
        def.initial_state = x0;
        Ok(ControlProblem { def })
    }

    pub fn with_random_controls(&self, controls: Vec<DVector<f64>>) -> Result<Self> {
        let mut def = self.def.clone();
        def.random_controls = controls;
        ControlProblem::new(def)
    }
}

fn check_dim(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        })
    }
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be > 0, got {value}")))
    }
}

/// Regularizer placed on unactuated noise channels so that σ stays invertible.
pub const UNACTUATED_NOISE_FRACTION: f64 = 1e-3;

fn bang_controls() -> Vec<DVector<f64>> {
    [-1.0, 0.0, 1.0]
        .into_iter()
        .map(|u| DVector::from_element(1, u))
        .collect()
}

fn constant_diffusion(diag: Vec<f64>) -> (Arc<DiffusionFn>, Arc<DiffusionFn>) {
    let sigma = DMatrix::from_diagonal(&DVector::from_vec(diag.clone()));
    let sigma_inv = DMatrix::from_diagonal(&DVector::from_iterator(
        diag.len(),
        diag.iter().map(|s| 1.0 / s),
    ));
    (
        Arc::new(move |_, _| sigma.clone()),
        Arc::new(move |_, _| sigma_inv.clone()),
    )
}

/// Minimum-fuel double integrator: `ẋ₁ = x₂`, `ẋ₂ = u`, `ℓ = a|u|`, `g = q₁x₁² + q₂x₂²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleIntegratorL1 {
    pub fuel_weight: f64,
    pub noise: f64,
    pub terminal_weight: [f64; 2],
    pub horizon: f64,
    pub initial_state: [f64; 2],
    pub roi: BoxRegion,
}

impl Default for DoubleIntegratorL1 {
    fn default() -> Self {
        DoubleIntegratorL1 {
            fuel_weight: 0.5,
            noise: 0.5,
            terminal_weight: [4.0, 1.0],
            horizon: 3.0,
            initial_state: [2.0, 0.0],
            roi: BoxRegion {
                lower: vec![-3.0, -3.0],
                upper: vec![3.0, 3.0],
            },
        }
    }
}

impl DoubleIntegratorL1 {
    pub fn build(&self) -> Result<ControlProblem> {
        require_positive("fuel_weight", self.fuel_weight)?;
        require_positive("noise", self.noise)?;
        for q in self.terminal_weight {
            require_positive("terminal_weight", q)?;
        }
        let a = self.fuel_weight;
        let [q1, q2] = self.terminal_weight;
        let (diffusion, diffusion_inverse) =
            constant_diffusion(vec![UNACTUATED_NOISE_FRACTION * self.noise, self.noise]);
        ControlProblem::new(ProblemDefinition {
            name: "double_integrator_l1".into(),
            state_dim: 2,
            control_dim: 1,
            horizon: self.horizon,
            drift: Arc::new(|_, x, u| DVector::from_vec(vec![x[1], u[0]])),
            diffusion,
            diffusion_inverse,
            running_cost: Arc::new(move |_, _, u| a * u[0].abs()),
            terminal_cost: Arc::new(move |x| q1 * x[0] * x[0] + q2 * x[1] * x[1]),
            control_bounds: BoxRegion::symmetric(&[1.0])?,
            control_candidates: bang_controls(),
            random_controls: bang_controls(),
            roi: self.roi.clone(),
            initial_state: DVector::from_column_slice(&self.initial_state),
        })
    }
}

pub fn make_double_integrator_l1(
    fuel_weight: f64,
    noise: f64,
    terminal_weight: [f64; 2],
) -> Result<ControlProblem> {
    DoubleIntegratorL1 {
        fuel_weight,
        noise,
        terminal_weight,
        ..Default::default()
    }
    .build()
}

/// Minimum-fuel pendulum with `θ = 0` upright:
/// `θ̈ = gravity_ratio · sin θ − damping · θ̇ + u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PendulumL1 {
    pub fuel_weight: f64,
    pub noise: f64,
    pub gravity_ratio: f64,
    pub damping: f64,
    pub terminal_weight: [f64; 2],
    pub horizon: f64,
    pub initial_state: [f64; 2],
    pub roi: BoxRegion,
}

impl Default for PendulumL1 {
    fn default() -> Self {
        PendulumL1 {
            fuel_weight: 0.1,
            noise: 0.8,
            gravity_ratio: 9.81,
            damping: 0.1,
            terminal_weight: [4.0, 1.0],
            horizon: 3.0,
            initial_state: [PI, 0.0],
            roi: BoxRegion {
                lower: vec![-PI / 2.0, -8.0],
                upper: vec![3.0 * PI / 2.0, 8.0],
            },
        }
    }
}

impl PendulumL1 {
    pub fn build(&self) -> Result<ControlProblem> {
        require_positive("fuel_weight", self.fuel_weight)?;
        require_positive("noise", self.noise)?;
        require_positive("gravity_ratio", self.gravity_ratio)?;
        if !(self.damping.is_finite() && self.damping >= 0.0) {
            return Err(Error::param("damping", "must be finite and >= 0"));
        }
        for q in self.terminal_weight {
            require_positive("terminal_weight", q)?;
        }
        let a = self.fuel_weight;
        let gr = self.gravity_ratio;
        let damping = self.damping;
        let [q1, q2] = self.terminal_weight;
        let (diffusion, diffusion_inverse) =
            constant_diffusion(vec![UNACTUATED_NOISE_FRACTION * self.noise, self.noise]);
        ControlProblem::new(ProblemDefinition {
            name: "pendulum_l1".into(),
            state_dim: 2,
            control_dim: 1,
            horizon: self.horizon,
            drift: Arc::new(move |_, x, u| {
                DVector::from_vec(vec![x[1], gr * x[0].sin() - damping * x[1] + u[0]])
            }),
            diffusion,
            diffusion_inverse,
            running_cost: Arc::new(move |_, _, u| a * u[0].abs()),
            terminal_cost: Arc::new(move |x| q1 * x[0] * x[0] + q2 * x[1] * x[1]),
            control_bounds: BoxRegion::symmetric(&[1.0])?,
            control_candidates: bang_controls(),
            random_controls: bang_controls(),
            roi: self.roi.clone(),
            initial_state: DVector::from_column_slice(&self.initial_state),
        })
    }
}

pub fn make_pendulum_l1(
    fuel_weight: f64,
    noise: f64,
    gravity_ratio: f64,
    damping: f64,
    terminal_weight: [f64; 2],
) -> Result<ControlProblem> {
    PendulumL1 {
        fuel_weight,
        noise,
        gravity_ratio,
        damping,
        terminal_weight,
        ..Default::default()
    }
    .build()
}

/// Linear dynamics with quadratic costs: `f = Ax + Bu`, `ℓ = xᵀQx + uᵀRu`, `g = xᵀQ_f x`,
/// constant diffusion, and controls restricted to a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearQuadratic {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub state_cost: DMatrix<f64>,
    pub control_cost: DMatrix<f64>,
    pub terminal_cost: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
    pub horizon: f64,
    pub initial_state: DVector<f64>,
    pub roi: BoxRegion,
    pub control_bounds: BoxRegion,
    pub grid_points: usize,
}

impl LinearQuadratic {
    /// Double-integrator LQ instance with `Q = 0.1 I`, `R = 1`, `Q_f = I`, `σ = noise · I`
    /// and 21 control levels on `[-1, 1]`.
    pub fn double_integrator(noise: f64) -> Self {
        LinearQuadratic {
            a: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
            b: DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
            state_cost: DMatrix::identity(2, 2) * 0.1,
            control_cost: DMatrix::identity(1, 1),
            terminal_cost: DMatrix::identity(2, 2),
            sigma: DMatrix::identity(2, 2) * noise,
            horizon: 3.0,
            initial_state: DVector::from_vec(vec![1.0, 0.0]),
            roi: BoxRegion {
                lower: vec![-2.0, -2.0],
                upper: vec![2.0, 2.0],
            },
            control_bounds: BoxRegion {
                lower: vec![-1.0],
                upper: vec![1.0],
            },
            grid_points: 21,
        }
    }

    pub fn build(&self) -> Result<ControlProblem> {
        let n = self.a.nrows();
        let m = self.b.ncols();
        check_dim("A columns", n, self.a.ncols())?;
        check_dim("B rows", n, self.b.nrows())?;
        for (ctx, mat, dim) in [
            ("state cost", &self.state_cost, n),
            ("control cost", &self.control_cost, m),
            ("terminal cost", &self.terminal_cost, n),
            ("sigma", &self.sigma, n),
        ] {
            check_dim(ctx, dim, mat.nrows())?;
            check_dim(ctx, dim, mat.ncols())?;
        }
        if self.control_cost.clone().cholesky().is_none() {
            return Err(Error::param("control_cost", "must be positive definite"));
        }
        for (name, mat) in [
            ("state_cost", &self.state_cost),
            ("terminal_cost", &self.terminal_cost),
        ] {
            let sym = (mat + mat.transpose()) * 0.5;
            if sym.symmetric_eigenvalues().min() < -1e-12 {
                return Err(Error::param(name, "must be positive semidefinite"));
            }
        }
        let sigma_inv = self
            .sigma
            .clone()
            .try_inverse()
            .ok_or(Error::SingularDiffusion { t: 0.0 })?;
        if self.grid_points < 1 {
            return Err(Error::param("grid_points", "must be at least 1"));
        }
        let grid = control_grid(&self.control_bounds, self.grid_points);

        let (a, b) = (self.a.clone(), self.b.clone());
        let (q, r, qf) = (
            self.state_cost.clone(),
            self.control_cost.clone(),
            self.terminal_cost.clone(),
        );
        let sigma = self.sigma.clone();
        ControlProblem::new(ProblemDefinition {
            name: "linear_quadratic".into(),
            state_dim: n,
            control_dim: m,
            horizon: self.horizon,
            drift: Arc::new(move |_, x, u| &a * x + &b * u),
            diffusion: Arc::new(move |_, _| sigma.clone()),
            diffusion_inverse: Arc::new(move |_, _| sigma_inv.clone()),
            running_cost: Arc::new(move |_, x, u| x.dot(&(&q * x)) + u.dot(&(&r * u))),
            terminal_cost: Arc::new(move |x| x.dot(&(&qf * x))),
            control_bounds: self.control_bounds.clone(),
            control_candidates: grid.clone(),
            random_controls: grid,
            roi: self.roi.clone(),
            initial_state: self.initial_state.clone(),
        })
    }
}

pub fn make_lq_problem(spec: &LinearQuadratic) -> Result<ControlProblem> {
    spec.build()
}

/// Tensor grid with `points` evenly spaced levels per control dimension.
pub fn control_grid(bounds: &BoxRegion, points: usize) -> Vec<DVector<f64>> {
    let m = bounds.dim();
    let levels: Vec<Vec<f64>> = bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(lo, hi)| {
            if points == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..points)
                    .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
                    .collect()
            }
        })
        .collect();
    let total = points.pow(m as u32);
    (0..total)
        .map(|mut flat| {
            DVector::from_iterator(
                m,
                levels.iter().map(|lv| {
                    let v = lv[flat % points];
                    flat /= points;
                    v
                }),
            )
        })
        .collect()
}

/// Driftless diffusion `dX = σ dW` with zero running cost and `g = xᵀQx`.
///
/// The only policy candidate is `u = 0`, so the on-policy value is
/// `E[g(X_T) | X_t = x]`. Exploration drifts come from `random_drifts`
/// (`f(t, x, u) = u`), which makes this the reference instance for checking
/// drift-compensated value recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct UncontrolledDiffusion {
    pub noise: f64,
    pub terminal_weight: Vec<f64>,
    pub horizon: f64,
    pub initial_state: Vec<f64>,
    pub roi: BoxRegion,
    pub random_drifts: Vec<Vec<f64>>,
}

impl Default for UncontrolledDiffusion {
    fn default() -> Self {
        UncontrolledDiffusion {
            noise: 1.0,
            terminal_weight: vec![1.0],
            horizon: 1.0,
            initial_state: vec![0.5],
            roi: BoxRegion {
                lower: vec![-2.0],
                upper: vec![2.0],
            },
            random_drifts: vec![vec![-1.0], vec![0.0], vec![1.0]],
        }
    }
}

impl UncontrolledDiffusion {
    pub fn build(&self) -> Result<ControlProblem> {
        let n = self.terminal_weight.len();
        require_positive("noise", self.noise)?;
        for q in &self.terminal_weight {
            if !(q.is_finite() && *q >= 0.0) {
                return Err(Error::param("terminal_weight", "must be >= 0"));
            }
        }
        let bound = self
            .random_drifts
            .iter()
            .flatten()
            .fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let weights = self.terminal_weight.clone();
        let (diffusion, diffusion_inverse) = constant_diffusion(vec![self.noise; n]);
        ControlProblem::new(ProblemDefinition {
            name: "uncontrolled_diffusion".into(),
            state_dim: n,
            control_dim: n,
            horizon: self.horizon,
            drift: Arc::new(|_, _, u| u.clone()),
            diffusion,
            diffusion_inverse,
            running_cost: Arc::new(|_, _, _| 0.0),
            terminal_cost: Arc::new(move |x| x.iter().zip(&weights).map(|(v, q)| q * v * v).sum()),
            control_bounds: BoxRegion::symmetric(&vec![bound; n])?,
            control_candidates: vec![DVector::zeros(n)],
            random_controls: self
                .random_drifts
                .iter()
                .map(|d| DVector::from_column_slice(d))
                .collect(),
            roi: self.roi.clone(),
            initial_state: DVector::from_column_slice(&self.initial_state),
        })
    }
}
