//! Browser bindings: grow a tree, run the solver, weight paths.
//!
//! Every export returns a JSON string; errors become JS exceptions.

use fbrrt::backward::softmin_weights;
use fbrrt::{Solver, SolverConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Trajectories returned by `solve`.
const SHOWN_TRAJECTORIES: usize = 24;

#[derive(Serialize)]
struct TreeView {
    roi: [[f64; 2]; 2],
    start: [f64; 2],
    /// `[x_parent, y_parent, x_child, y_child]` per edge.
    edges: Vec<[f64; 4]>,
}

#[derive(Serialize)]
struct SolveView {
    roi: [[f64; 2]; 2],
    start: [f64; 2],
    mean_costs: Vec<f64>,
    accumulated_min: Vec<f64>,
    work_units: Vec<u64>,
    /// Rollouts of the last iteration's policy, as `[x, y]` points.
    trajectories: Vec<Vec<[f64; 2]>>,
}

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn solver(
    problem: &str,
    particles: usize,
    iterations: usize,
    seed: u64,
) -> Result<Solver, JsError> {
    let mut config = SolverConfig::parse(&format!(
        "problem = {problem}\nparticles = {particles}\niterations = {iterations}\nseed = {seed}\nrollout_count = 64"
    ))
    .map_err(js_err)?;
    config.metric_weights = None;
    let solver = Solver::new(config).map_err(js_err)?;
    if solver.problem().state_dim() != 2 {
        return Err(JsError::new("the demo draws two-dimensional problems only"));
    }
    Ok(solver)
}

fn frame(solver: &Solver) -> ([[f64; 2]; 2], [f64; 2]) {
    let roi = solver.problem().roi();
    let x0 = solver.problem().initial_state();
    (
        [[roi.lower[0], roi.lower[1]], [roi.upper[0], roi.upper[1]]],
        [x0[0], x0[1]],
    )
}

/// One forward expansion from the initial state of `problem`
/// (`double_integrator`, `pendulum` or `linear_quadratic`).
#[wasm_bindgen]
pub fn grow_tree(problem: &str, particles: usize, seed: u64) -> Result<String, JsError> {
    let solver = solver(problem, particles, 1, seed)?;
    let mut edges = Vec::new();
    solver
        .run_observed(|out| {
            let nodes = out.tree.nodes();
            edges = nodes
                .iter()
                .filter_map(|n| {
                    let p = &nodes[n.parent?].state;
                    Some([p[0], p[1], n.state[0], n.state[1]])
                })
                .collect();
            Ok(())
        })
        .map_err(js_err)?;
    let (roi, start) = frame(&solver);
    serde_json::to_string(&TreeView { roi, start, edges }).map_err(js_err)
}

/// Full solve; returns the cost curve and sample closed-loop trajectories.
#[wasm_bindgen]
pub fn solve(
    problem: &str,
    particles: usize,
    iterations: usize,
    seed: u64,
) -> Result<String, JsError> {
    let solver = solver(problem, particles, iterations, seed)?;
    let mut trajectories = Vec::new();
    let report = solver
        .run_observed(|out| {
            trajectories = out
                .rollout
                .trajectories
                .iter()
                .take(SHOWN_TRAJECTORIES)
                .map(|t| t.states.iter().map(|x| [x[0], x[1]]).collect())
                .collect();
            Ok(())
        })
        .map_err(js_err)?;
    let (roi, start) = frame(&solver);
    serde_json::to_string(&SolveView {
        roi,
        start,
        mean_costs: report.mean_costs(),
        accumulated_min: report.accumulated_min(),
        work_units: report
            .iterations
            .iter()
            .map(|r| r.cumulative_work_units)
            .collect(),
        trajectories,
    })
    .map_err(js_err)
}

/// Softmin weights of comma-separated heuristic values.
#[wasm_bindgen]
pub fn softmin(rho: &str, lambda: f64) -> Result<String, JsError> {
    let values = rho
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(js_err)?;
    let weights = softmin_weights(&values, lambda).map_err(js_err)?;
    serde_json::to_string(&weights).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_has_edges() {
        let json = grow_tree("double_integrator", 32, 1).ok().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["edges"].as_array().unwrap().len(), 32 * 30);
    }

    #[test]
    fn solve_reports_every_iteration() {
        let json = solve("double_integrator", 32, 3, 1).ok().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["mean_costs"].as_array().unwrap().len(), 3);
        assert_eq!(
            v["trajectories"].as_array().unwrap().len(),
            SHOWN_TRAJECTORIES
        );
    }

    #[test]
    fn softmin_weights_average_one() {
        let w: Vec<f64> = serde_json::from_str(&softmin("1, 2, 3", 1.0).ok().unwrap()).unwrap();
        assert!((w.iter().sum::<f64>() / 3.0 - 1.0).abs() < 1e-12);
    }
}
