//! Local-entropy weighted least-squares Monte Carlo backward pass.
//!
//! Walking the tree from the terminal layer down, each edge `(x_i, k_i, x_{i+1})`
//! yields the drift-compensated target
//!
//! ```text
//! ŷ_i = V(x_{i+1}; α_{i+1}) + (ℓ(t_i, x_i, μ) + zᵀ d) Δt,
//! z   = σᵀ(t_{i+1}, x_{i+1}) ∂ₓV(x_{i+1}; α_{i+1}),
//! d   = σ⁻¹(t_{i+1}, x_{i+1}) (f(t_i, x_i, μ) − k_i),
//! ```
//!
//! with `μ` the target policy at `x_i`. Paths are weighted by the softmin of the
//! heuristic `ρ = V(x_{i+1}; α_{i+1}) + ∫₀^{t_{i+1}} ℓ ds` and `α_i` is the weighted
//! ridge fit of `ŷ_i` on `Φ(x_i)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::{
    feature_count, features, value_grad, weighted_least_squares, ValueCoefficients,
    WeightedRegressionInput,
};
use crate::error::{Error, Result};
use crate::problem::{BoxRegion, ControlProblem, TimeGrid};
use crate::solver::rollout::rollout_policy;
use crate::tree::{BranchTree, LayerScores, NodeId};
use crate::work::WorkCounter;

/// Temperature of the softmin path weighting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Lambda {
    Fixed(f64),
    /// Multiple of the interquartile range of the terminal-layer heuristic.
    IqrScaled(f64),
    /// `λ → ∞`: every path weighs the same.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardConfig {
    pub lambda: Lambda,
    pub ridge: f64,
}

#[derive(Debug, Clone)]
pub struct BackwardArtifacts {
    pub coefficients: ValueCoefficients,
    /// Heuristic `ρ` per layer; layer 0 holds the fitted root values.
    pub rho: LayerScores,
    /// Softmin weights per layer (mean 1); layer 0 is empty.
    pub weights: LayerScores,
    /// Weighted RMS residual of the fit for `α_i`, indexed by `i`.
    pub residuals: Vec<f64>,
    /// Effective sample size `(ΣΘ)² / ΣΘ²` of the weights used for `α_i`.
    pub effective_sample_size: Vec<f64>,
    /// Resolved temperature; `None` for uniform weighting.
    pub lambda: Option<f64>,
    pub work: WorkCounter,
}

const TIE_TOLERANCE: f64 = 1e-12;

/// Index of the candidate minimizing `ℓ(t, x, u) + f(t, x, u)ᵀ ∂ₓV(x; α_next)`.
///
/// Scores within a relative `1e-12` are ties, resolved by smaller `ℓ` and then
/// by lower candidate index.
pub fn target_policy(
    problem: &ControlProblem,
    t: f64,
    x: &DVector<f64>,
    alpha_next: &DVector<f64>,
    domain: &BoxRegion,
) -> Result<usize> {
    let grad = value_grad(x, alpha_next, domain)?;
    policy_from_gradient(problem, t, x, &grad)
}

pub fn policy_from_gradient(
    problem: &ControlProblem,
    t: f64,
    x: &DVector<f64>,
    grad: &DVector<f64>,
) -> Result<usize> {
    let candidates = problem.control_candidates();
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    let mut best_cost = f64::INFINITY;
    for (idx, u) in candidates.iter().enumerate() {
        let cost = problem.running_cost(t, x, u);
        let score = cost + problem.drift(t, x, u).dot(grad);
        let tol = TIE_TOLERANCE * score.abs().max(best_score.abs()).max(1.0);
        let better = best_score.is_infinite()
            || score < best_score - tol
            || ((score - best_score).abs() <= tol && cost < best_cost);
        if better {
            best = idx;
            best_score = score;
            best_cost = cost;
        }
    }
    Ok(best)
}

/// Regression target for one edge and the value estimate at its head.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsdeTarget {
    pub y_hat: f64,
    pub y_next: f64,
    /// `zᵀ d Δt`, the drift-compensation term.
    pub correction: f64,
    /// `|d|`.
    pub drift_mismatch: f64,
}

/// Drift-compensated target for the edge `(x_i, k_i) → x_next` given the
/// precomputed policy control index at `x_i`.
#[allow(clippy::too_many_arguments)]
fn bsde_target_with_policy(
    problem: &ControlProblem,
    grid: &TimeGrid,
    i: usize,
    x_i: &DVector<f64>,
    drift: &DVector<f64>,
    x_next: &DVector<f64>,
    alpha_next: &DVector<f64>,
    domain: &BoxRegion,
    policy: usize,
) -> Result<BsdeTarget> {
    let t_i = grid.time(i);
    let t_next = grid.time(i + 1);
    let y_next = features(x_next, domain).dot(alpha_next);
    let grad = value_grad(x_next, alpha_next, domain)?;
    let z = problem.diffusion(t_next, x_next).tr_mul(&grad);
    let u = &problem.control_candidates()[policy];
    let f_mu = problem.drift(t_i, x_i, u);
    let d = problem.diffusion_inverse(t_next, x_next) * (f_mu - drift);
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularDiffusion { t: t_next });
    }
    let correction = z.dot(&d) * grid.dt();
    let running = problem.running_cost(t_i, x_i, u) * grid.dt();
    Ok(BsdeTarget {
        y_hat: y_next + running + correction,
        y_next,
        correction,
        drift_mismatch: d.norm(),
    })
}

pub fn bsde_target(
    problem: &ControlProblem,
    grid: &TimeGrid,
    i: usize,
    x_i: &DVector<f64>,
    drift: &DVector<f64>,
    x_next: &DVector<f64>,
    coeffs: &ValueCoefficients,
) -> Result<BsdeTarget> {
    let alpha_next = coeffs.alpha(i + 1)?;
    let policy = target_policy(problem, grid.time(i), x_i, alpha_next, coeffs.domain())?;
    bsde_target_with_policy(
        problem,
        grid,
        i,
        x_i,
        drift,
        x_next,
        alpha_next,
        coeffs.domain(),
        policy,
    )
}

/// Path heuristic: value estimate at the node plus the running cost accrued to reach it.
pub fn path_heuristic(value_estimate: f64, run_cost: f64) -> f64 {
    value_estimate + run_cost
}

/// `Θ_j = exp(−(ρ_j − min ρ)/λ) / mean_k exp(−(ρ_k − min ρ)/λ)`; `λ = ∞` gives ones.
pub fn softmin_weights(rho: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::param("lambda", format!("must be > 0, got {lambda}")));
    }
    if rho.iter().any(|r| !r.is_finite()) {
        return Err(Error::param("rho", "heuristic values must be finite"));
    }
    if rho.is_empty() {
        return Ok(Vec::new());
    }
    if lambda.is_infinite() {
        return Ok(vec![1.0; rho.len()]);
    }
    let min = rho.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = rho.iter().map(|r| (-(r - min) / lambda).exp()).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    Ok(raw.into_iter().map(|w| w / mean).collect())
}

pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    if s2 > 0.0 {
        s * s / s2
    } else {
        0.0
    }
}

/// Linear-interpolation quartiles.
fn interquartile_range(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    q(0.75) - q(0.25)
}

fn resolve_lambda(lambda: Lambda, terminal_rho: &[f64]) -> Result<Option<f64>> {
    match lambda {
        Lambda::Uniform => Ok(None),
        Lambda::Fixed(l) => {
            if l > 0.0 && l.is_finite() {
                Ok(Some(l))
            } else {
                Err(Error::param(
                    "lambda",
                    format!("must be finite and > 0, got {l}"),
                ))
            }
        }
        Lambda::IqrScaled(s) => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::param(
                    "lambda",
                    format!("scale must be > 0, got {s}"),
                ));
            }
            let iqr = interquartile_range(terminal_rho);
            let spread = if iqr > 0.0 {
                iqr
            } else {
                let (lo, hi) = terminal_rho
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
                        (a.min(*r), b.max(*r))
                    });
                if hi > lo {
                    hi - lo
                } else {
                    1.0
                }
            };
            Ok(Some(s * spread))
        }
    }
}

struct LayerFit {
    alpha: DVector<f64>,
    residual: f64,
}

fn fit_layer(
    rows: &[&DVector<f64>],
    targets: &[f64],
    weights: &[f64],
    domain: &BoxRegion,
    ridge: f64,
    constant_only: bool,
) -> Result<LayerFit> {
    let p = feature_count(domain.dim());
    let wsum: f64 = weights.iter().sum();
    let alpha = if constant_only {
        let mean = weights.iter().zip(targets).map(|(w, y)| w * y).sum::<f64>() / wsum;
        let mut a = DVector::zeros(p);
        a[0] = mean;
        a
    } else {
        let mut phi = DMatrix::zeros(rows.len(), p);
        for (r, x) in rows.iter().enumerate() {
            phi.row_mut(r).copy_from(&features(x, domain).transpose());
        }
        weighted_least_squares(&WeightedRegressionInput {
            features: phi,
            targets: DVector::from_column_slice(targets),
            weights: DVector::from_column_slice(weights),
            ridge,
        })?
    };
    let sse: f64 = rows
        .iter()
        .zip(targets)
        .zip(weights)
        .map(|((x, y), w)| {
            let r = y - features(x, domain).dot(&alpha);
            w * r * r
        })
        .sum();
    Ok(LayerFit {
        alpha,
        residual: (sse / wsum).sqrt(),
    })
}

/// One backward sweep over a fully expanded tree, producing `α_0 … α_N`.
///
/// The terminal fit uses uniform weights. Layer 0 is fit with a constant when all
/// roots share one state, since only the value at that state is identifiable.
pub fn backward_pass(
    problem: &ControlProblem,
    tree: &BranchTree,
    config: &BackwardConfig,
) -> Result<BackwardArtifacts> {
    let grid = *tree.grid();
    let n_steps = grid.steps();
    let domain = problem.roi().clone();
    let p = feature_count(problem.state_dim());
    for i in 0..=n_steps {
        if tree.layer(i).is_empty() {
            return Err(Error::EmptyLayer(i));
        }
    }
    let mut work = WorkCounter::default();
    let mut alphas = vec![DVector::zeros(p); n_steps + 1];
    let mut rho: LayerScores = vec![Vec::new(); n_steps + 1];
    let mut weights: LayerScores = vec![Vec::new(); n_steps + 1];
    let mut residuals = vec![0.0; n_steps + 1];
    let mut ess = vec![0.0; n_steps + 1];

    let terminal = tree.layer(n_steps);
    let terminal_states: Vec<&DVector<f64>> =
        terminal.iter().map(|&id| &tree.nodes()[id].state).collect();
    let terminal_targets: Vec<f64> = terminal_states
        .iter()
        .map(|x| problem.terminal_cost(x))
        .collect();
    let uniform = vec![1.0; terminal.len()];
    let fit = fit_layer(
        &terminal_states,
        &terminal_targets,
        &uniform,
        &domain,
        config.ridge,
        false,
    )
    .map_err(|e| layer_error(n_steps, e))?;
    work.regression_rows += terminal.len() as u64;
    alphas[n_steps] = fit.alpha;
    residuals[n_steps] = fit.residual;
    ess[n_steps] = terminal.len() as f64;

    let terminal_rho: Vec<f64> = terminal
        .iter()
        .zip(&terminal_states)
        .map(|(&id, x)| {
            path_heuristic(
                features(x, &domain).dot(&alphas[n_steps]),
                tree.nodes()[id].run_cost,
            )
        })
        .collect();
    let lambda = resolve_lambda(config.lambda, &terminal_rho)?;

    let mut policy_cache: Vec<Option<usize>> = vec![None; tree.len()];
    for i in (0..n_steps).rev() {
        let children = tree.layer(i + 1);
        let alpha_next = alphas[i + 1].clone();
        let mut parents: Vec<&DVector<f64>> = Vec::with_capacity(children.len());
        let mut targets = Vec::with_capacity(children.len());
        let mut layer_rho = Vec::with_capacity(children.len());
        for &child_id in children {
            let child = &tree.nodes()[child_id];
            let parent_id: NodeId = child.parent.ok_or(Error::UnknownNode(child_id))?;
            let parent = &tree.nodes()[parent_id];
            let edge = child.edge.as_ref().ok_or(Error::UnknownNode(child_id))?;
            let policy = match policy_cache[parent_id] {
                Some(idx) => idx,
                None => {
                    work.policy_calls += 1;
                    work.candidate_evals += problem.control_candidates().len() as u64;
                    let idx =
                        target_policy(problem, grid.time(i), &parent.state, &alpha_next, &domain)?;
                    policy_cache[parent_id] = Some(idx);
                    idx
                }
            };
            let target = bsde_target_with_policy(
                problem,
                &grid,
                i,
                &parent.state,
                &edge.drift,
                &child.state,
                &alpha_next,
                &domain,
                policy,
            )?;
            parents.push(&parent.state);
            targets.push(target.y_hat);
            layer_rho.push(path_heuristic(target.y_next, child.run_cost));
        }
        let theta = match lambda {
            Some(l) => softmin_weights(&layer_rho, l)?,
            None => vec![1.0; layer_rho.len()],
        };
        let constant_only = i == 0 && parents.windows(2).all(|w| w[0] == w[1]);
        let fit = fit_layer(
            &parents,
            &targets,
            &theta,
            &domain,
            config.ridge,
            constant_only,
        )
        .map_err(|e| layer_error(i, e))?;
        work.regression_rows += parents.len() as u64;
        alphas[i] = fit.alpha;
        residuals[i] = fit.residual;
        ess[i] = effective_sample_size(&theta);
        rho[i + 1] = layer_rho;
        weights[i + 1] = theta;
    }
    rho[0] = tree
        .layer(0)
        .iter()
        .map(|&id| features(&tree.nodes()[id].state, &domain).dot(&alphas[0]))
        .collect();

    Ok(BackwardArtifacts {
        coefficients: ValueCoefficients::new(problem.state_dim(), domain, alphas)?,
        rho,
        weights,
        residuals,
        effective_sample_size: ess,
        lambda,
        work,
    })
}

fn layer_error(layer: usize, source: Error) -> Error {
    Error::LayerRegression {
        layer,
        source: Box::new(source),
    }
}

/// Outcome of one λ candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCandidate {
    pub lambda: Lambda,
    pub resolved: Option<f64>,
    pub mean_cost: Option<f64>,
    pub error: Option<String>,
}

/// Runs a backward pass per candidate temperature and keeps the one whose policy
/// has the lowest mean rollout cost under a shared rollout seed. Ties go to the
/// smaller resolved λ (uniform counts as infinite).
pub fn lambda_search(
    problem: &ControlProblem,
    tree: &BranchTree,
    candidates: &[Lambda],
    ridge: f64,
    rollout_count: usize,
    seed: u64,
) -> Result<(BackwardArtifacts, Vec<LambdaCandidate>)> {
    if candidates.is_empty() {
        return Err(Error::param("lambda grid", "must not be empty"));
    }
    let evaluate = |lambda: &Lambda| -> Result<(BackwardArtifacts, f64)> {
        let mut artifacts = backward_pass(
            problem,
            tree,
            &BackwardConfig {
                lambda: *lambda,
                ridge,
            },
        )?;
        let report = rollout_policy(
            problem,
            tree.grid(),
            &artifacts.coefficients,
            problem.initial_state(),
            rollout_count,
            seed,
        )?;
        artifacts.work.add(&report.work);
        Ok((artifacts, report.mean_cost()))
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Result<(BackwardArtifacts, f64)>> = {
        use rayon::prelude::*;
        candidates.par_iter().map(evaluate).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(BackwardArtifacts, f64)>> = candidates.iter().map(evaluate).collect();

    let mut summary = Vec::with_capacity(candidates.len());
    let mut best: Option<(BackwardArtifacts, f64)> = None;
    let mut last_error = None;
    let mut total_work = WorkCounter::default();
    for (lambda, result) in candidates.iter().zip(results) {
        match result {
            Ok((artifacts, cost)) => {
                total_work.add(&artifacts.work);
                summary.push(LambdaCandidate {
                    lambda: *lambda,
                    resolved: artifacts.lambda,
                    mean_cost: Some(cost),
                    error: None,
                });
                let key = |a: &BackwardArtifacts| a.lambda.unwrap_or(f64::INFINITY);
                let replace = match &best {
                    None => true,
                    Some((b, bc)) => cost < *bc || (cost == *bc && key(&artifacts) < key(b)),
                };
                if replace {
                    best = Some((artifacts, cost));
                }
            }
            Err(e) => {
                summary.push(LambdaCandidate {
                    lambda: *lambda,
                    resolved: None,
                    mean_cost: None,
                    error: Some(e.to_string()),
                });
                last_error = Some(e);
            }
        }
    }
    match best {
        Some((mut artifacts, _)) => {
            artifacts.work = total_work;
            Ok((artifacts, summary))
        }
        None => Err(Error::AllLambdaCandidatesFailed(Box::new(
            last_error.expect("at least one candidate"),
        ))),
    }
}

/// Default search grid `{0.1, 0.3, 1, 3, 10} × IQR(ρ_N)`.
pub fn default_lambda_grid() -> Vec<Lambda> {
    [0.1, 0.3, 1.0, 3.0, 10.0]
        .into_iter()
        .map(Lambda::IqrScaled)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{make_double_integrator_l1, BoxRegion, UncontrolledDiffusion};
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn softmin_examples() {
        assert_eq!(
            softmin_weights(&[2.0, 2.0, 2.0], 0.7).unwrap(),
            vec![1.0; 3]
        );
        let lambda = 0.3;
        let w = softmin_weights(&[0.0, lambda * 2f64.ln()], lambda).unwrap();
        assert_relative_eq!(w[0], 4.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(w[1], 2.0 / 3.0, epsilon = 1e-14);
        let sharp = softmin_weights(&[1.0, 0.0, 2.0, 3.0], 1e-4).unwrap();
        assert_relative_eq!(sharp[1], 4.0, epsilon = 1e-12);
        assert!(sharp[0] < 1e-12 && sharp[2] < 1e-12);
        assert!(softmin_weights(&[1.0], 0.0).is_err());
        assert_eq!(
            softmin_weights(&[1.0, 5.0], f64::INFINITY).unwrap(),
            vec![1.0, 1.0]
        );
    }

    #[test]
    fn softmin_survives_huge_heuristics() {
        let w = softmin_weights(&[1e6, 1e6 + 1.0, 2e6], 0.5).unwrap();
        assert!(w.iter().all(|x| x.is_finite()));
        assert_relative_eq!(w.iter().sum::<f64>() / 3.0, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn effective_sample_size_bounds() {
        assert_relative_eq!(effective_sample_size(&[1.0; 10]), 10.0);
        assert_relative_eq!(effective_sample_size(&[10.0, 0.0, 0.0]), 1.0);
    }

    #[test]
    fn zero_gradient_prefers_free_control() {
        let p = make_double_integrator_l1(0.5, 0.5, [4.0, 1.0]).unwrap();
        let constant = v(&[3.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let idx = target_policy(&p, 0.0, &v(&[1.0, -1.0]), &constant, p.roi()).unwrap();
        assert_eq!(p.control_candidates()[idx][0], 0.0);
    }

    #[test]
    fn policy_example_scores() {
        // ∂V/∂x2 = 2 and a = 0.5: scores {0.5 - 2, 0, 0.5 + 2}
        let p = make_double_integrator_l1(0.5, 0.5, [4.0, 1.0]).unwrap();
        let grad = v(&[0.0, 2.0]);
        let idx = policy_from_gradient(&p, 0.0, &v(&[0.0, 0.0]), &grad).unwrap();
        assert_eq!(p.control_candidates()[idx][0], -1.0);
    }

    #[test]
    fn on_policy_edge_has_no_correction() {
        let p = UncontrolledDiffusion::default().build().unwrap();
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let coeffs =
            ValueCoefficients::new(1, p.roi().clone(), vec![v(&[0.3, 0.1, 0.4]); 11]).unwrap();
        let x = v(&[0.2]);
        let next = v(&[0.5]);
        let target = bsde_target(&p, &grid, 3, &x, &v(&[0.0]), &next, &coeffs).unwrap();
        assert_eq!(target.correction, 0.0);
        assert_eq!(target.drift_mismatch, 0.0);
        assert_relative_eq!(target.y_hat, coeffs.value(4, &next).unwrap());
    }

    #[test]
    fn constant_value_zero_cost_target_is_constant() {
        let p = UncontrolledDiffusion::default().build().unwrap();
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let coeffs =
            ValueCoefficients::new(1, p.roi().clone(), vec![v(&[2.5, 0.0, 0.0]); 11]).unwrap();
        for (x, k, next) in [(0.1, 1.0, 0.4), (-1.0, -1.0, 0.9)] {
            let t = bsde_target(&p, &grid, 0, &v(&[x]), &v(&[k]), &v(&[next]), &coeffs).unwrap();
            assert_eq!(t.y_hat, 2.5);
        }
    }

    #[test]
    fn correction_arithmetic() {
        // σ = 2, z = σ ∂V = 1 (∂V = 0.5), f^μ − k = 0.4 → zᵀd Δt = 1 · 0.2 · 0.1
        let p = UncontrolledDiffusion {
            noise: 2.0,
            random_drifts: vec![vec![-0.4]],
            ..Default::default()
        }
        .build()
        .unwrap();
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let domain = BoxRegion::symmetric(&[1.0]).unwrap();
        // V(x) = 0.5 x on the unit box
        let coeffs = ValueCoefficients::new(1, domain, vec![v(&[0.0, 0.5, 0.0]); 11]).unwrap();
        let alpha = coeffs.alpha(1).unwrap();
        let target = bsde_target_with_policy(
            &p,
            &grid,
            0,
            &v(&[0.0]),
            &v(&[-0.4]),
            &v(&[0.3]),
            alpha,
            coeffs.domain(),
            0,
        )
        .unwrap();
        assert_relative_eq!(target.correction, 0.02, epsilon = 1e-15);
        assert_relative_eq!(target.y_hat, 0.15 + 0.02, epsilon = 1e-15);
    }

    #[test]
    fn heuristic_sums_value_and_cost() {
        assert_eq!(path_heuristic(0.0, 1.5), 1.5);
        assert_eq!(path_heuristic(2.0, 0.0), 2.0);
        assert_eq!(path_heuristic(2.0, 1.5), 3.5);
    }

    #[test]
    fn iqr_lambda_resolution() {
        let rho = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(
            resolve_lambda(Lambda::IqrScaled(1.0), &rho)
                .unwrap()
                .unwrap(),
            2.0
        );
        assert_relative_eq!(
            resolve_lambda(Lambda::IqrScaled(0.5), &[1.0, 1.0, 1.0, 1.0, 5.0])
                .unwrap()
                .unwrap(),
            2.0
        );
        assert_eq!(
            resolve_lambda(Lambda::IqrScaled(3.0), &[2.0, 2.0]).unwrap(),
            Some(3.0)
        );
        assert_eq!(resolve_lambda(Lambda::Uniform, &rho).unwrap(), None);
        assert!(resolve_lambda(Lambda::Fixed(-1.0), &rho).is_err());
    }
}
