//! Closed-form reference values for validation.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::basis::{QuadraticForm, ValueCoefficients};
use crate::error::{Error, Result};
use crate::problem::{BoxRegion, LinearQuadratic, TimeGrid};
use crate::rng::stream_rng;
use crate::solver::rollout::rollout_policy;

/// Finite-horizon LQR solution on a time grid: `V(t_i, x) = xᵀP_i x + c_i`,
/// `u_i = -K_i x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    pub p: Vec<DMatrix<f64>>,
    pub c: Vec<f64>,
    pub gains: Vec<DMatrix<f64>>,
}

impl RiccatiSolution {
    pub fn quadratics(&self) -> Vec<QuadraticForm> {
        self.p
            .iter()
            .zip(&self.c)
            .map(|(p, &c)| QuadraticForm::pure(p.clone(), c))
            .collect()
    }

    pub fn coefficients(&self, domain: &BoxRegion) -> Result<ValueCoefficients> {
        quadratics_to_coefficients(&self.quadratics(), domain)
    }
}

pub fn quadratics_to_coefficients(
    forms: &[QuadraticForm],
    domain: &BoxRegion,
) -> Result<ValueCoefficients> {
    ValueCoefficients::new(
        domain.dim(),
        domain.clone(),
        forms.iter().map(|q| q.to_coefficients(domain)).collect(),
    )
}

/// Backward Riccati recursion for the Euler discretization
/// `x⁺ = (I + AΔt)x + BΔt u`, stage cost `(xᵀQx + uᵀRu)Δt`, with the
/// additive-noise constant `c_i = c_{i+1} + trace(σσᵀP_{i+1})Δt`.
pub fn riccati_oracle(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    state_cost: &DMatrix<f64>,
    control_cost: &DMatrix<f64>,
    terminal_cost: &DMatrix<f64>,
    sigma: &DMatrix<f64>,
    grid: &TimeGrid,
) -> Result<RiccatiSolution> {
    let n = a.nrows();
    let m = b.ncols();
    for (context, rows, cols, er, ec) in [
        ("A", a.nrows(), a.ncols(), n, n),
        ("B", b.nrows(), b.ncols(), n, m),
        ("state cost", state_cost.nrows(), state_cost.ncols(), n, n),
        (
            "control cost",
            control_cost.nrows(),
            control_cost.ncols(),
            m,
            m,
        ),
        (
            "terminal cost",
            terminal_cost.nrows(),
            terminal_cost.ncols(),
            n,
            n,
        ),
        ("sigma", sigma.nrows(), sigma.ncols(), n, n),
    ] {
        if rows != er || cols != ec {
            return Err(Error::DimensionMismatch {
                context,
                expected: er * ec,
                actual: rows * cols,
            });
        }
    }
    if control_cost.clone().cholesky().is_none() {
        return Err(Error::param("control_cost", "must be positive definite"));
    }
    let dt = grid.dt();
    let steps = grid.steps();
    let ad = DMatrix::identity(n, n) + a * dt;
    let bd = b * dt;
    let qd = state_cost * dt;
    let rd = control_cost * dt;
    let noise = sigma * sigma.transpose();

    let mut p = vec![DMatrix::zeros(n, n); steps + 1];
    let mut c = vec![0.0; steps + 1];
    let mut gains = vec![DMatrix::zeros(m, n); steps];
    p[steps] = terminal_cost.clone();
    for i in (0..steps).rev() {
        let next = &p[i + 1];
        let s = &rd + bd.transpose() * next * &bd;
        let chol = s
            .cholesky()
            .ok_or_else(|| Error::param("control_cost", "Riccati step lost definiteness"))?;
        let k = chol.solve(&(bd.transpose() * next * &ad));
        let closed = &ad - &bd * &k;
        let pi = &qd + k.transpose() * &rd * &k + closed.transpose() * next * &closed;
        c[i] = c[i + 1] + (&noise * next).trace() * dt;
        p[i] = (&pi + pi.transpose()) * 0.5;
        gains[i] = k;
    }
    Ok(RiccatiSolution { p, c, gains })
}

pub fn riccati_for(spec: &LinearQuadratic, grid: &TimeGrid) -> Result<RiccatiSolution> {
    riccati_oracle(
        &spec.a,
        &spec.b,
        &spec.state_cost,
        &spec.control_cost,
        &spec.terminal_cost,
        &spec.sigma,
        grid,
    )
}

/// `V(t, x) = E[g(X_T) | X_t = x]` for `dX = σ dW`, `ℓ = 0`, `g = xᵀQx + c`:
/// `V(t, x) = xᵀQx + trace(σσᵀQ)(T − t) + c`.
pub fn analytic_heat_value(
    sigma: &DMatrix<f64>,
    q: &DMatrix<f64>,
    c: f64,
    grid: &TimeGrid,
) -> Result<Vec<QuadraticForm>> {
    let n = q.nrows();
    if sigma.nrows() != n || sigma.ncols() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "heat value",
            expected: n * n,
            actual: sigma.nrows() * sigma.ncols(),
        });
    }
    let rate = (sigma * sigma.transpose() * q).trace();
    Ok((0..=grid.steps())
        .map(|i| QuadraticForm::pure(q.clone(), c + rate * (grid.horizon() - grid.time(i))))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// One Riccati step with `A = 0, B = I, Q = 0, σ = 0` against a brute-force
/// minimization of `u²Δt + (x + uΔt)²`.
fn check_riccati_step() -> Result<OracleCheck> {
    let dt = 0.1;
    let one = DMatrix::from_element(1, 1, 1.0);
    let zero = DMatrix::zeros(1, 1);
    let sol = riccati_oracle(
        &zero,
        &one,
        &zero,
        &one,
        &one,
        &zero,
        &TimeGrid::new(dt, 1)?,
    )?;
    let x = 0.7;
    let brute = (-20_000..=20_000)
        .map(|k| {
            let u = k as f64 * 1e-4;
            u * u * dt + (x + u * dt).powi(2)
        })
        .fold(f64::INFINITY, f64::min);
    let predicted = sol.p[0][(0, 0)] * x * x;
    let err = (brute - predicted).abs();
    Ok(OracleCheck {
        name: "riccati one-step vs brute force",
        passed: err < 1e-8,
        detail: format!("brute {brute:.10}, riccati {predicted:.10}"),
    })
}

/// Heat value `x² + T` at `x = 0.5`, `T = 1` against Monte Carlo over `samples`
/// draws of `X_T = x + W_T`.
fn check_heat_value(samples: usize, seed: u64) -> Result<OracleCheck> {
    let grid = TimeGrid::new(1.0, 20)?;
    let one = DMatrix::from_element(1, 1, 1.0);
    let forms = analytic_heat_value(&one, &one, 0.0, &grid)?;
    let x = 0.5;
    let exact = forms[0].eval(&DVector::from_element(1, x));
    let mut rng = stream_rng(seed, 0);
    let draws: Vec<f64> = (0..samples)
        .map(|_| {
            let w: f64 = StandardNormal.sample(&mut rng);
            (x + w).powi(2)
        })
        .collect();
    let mean = draws.iter().sum::<f64>() / samples as f64;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let se = (var / samples as f64).sqrt();
    Ok(OracleCheck {
        name: "heat value vs Monte Carlo",
        passed: (mean - exact).abs() < 3.0 * se,
        detail: format!("exact {exact:.4}, MC {mean:.4} ± {se:.4}"),
    })
}

/// Closed-loop rollouts of the Riccati value on the grid-control LQ problem
/// against the predicted `x0ᵀP₀x0 + c₀`.
fn check_lq_rollout(count: usize, seed: u64) -> Result<OracleCheck> {
    let spec = LinearQuadratic::double_integrator(0.3);
    let problem = spec.build()?;
    let grid = TimeGrid::new(spec.horizon, 30)?;
    let sol = riccati_for(&spec, &grid)?;
    let coeffs = sol.coefficients(&spec.roi)?;
    let x0 = &spec.initial_state;
    let predicted = x0.dot(&(&sol.p[0] * x0)) + sol.c[0];
    let report = rollout_policy(&problem, &grid, &coeffs, x0, count, seed)?;
    let mean = report.mean_cost();
    let rel = (mean - predicted).abs() / predicted;
    Ok(OracleCheck {
        name: "LQ rollout vs Riccati prediction",
        passed: rel < 0.1,
        detail: format!(
            "predicted {predicted:.4}, rollout mean {mean:.4} ({:.1}%)",
            100.0 * rel
        ),
    })
}

/// Self-checks of the reference oracles.
pub fn validation_suite(seed: u64) -> Result<Vec<OracleCheck>> {
    Ok(vec![
        check_riccati_step()?,
        check_heat_value(100_000, seed)?,
        check_lq_rollout(2000, seed)?,
    ])
}
