//! Closed-loop policy evaluation.

use nalgebra::DVector;
use serde::Serialize;

use crate::backward::target_policy;
use crate::basis::ValueCoefficients;
use crate::error::{Error, Result};
use crate::forward::{brownian_increment, euler_maruyama_step};
use crate::problem::{ControlProblem, TimeGrid};
use crate::rng::stream_rng;
use crate::work::WorkCounter;

/// One simulated closed-loop trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<DVector<f64>>,
    /// Candidate index applied at each step.
    pub controls: Vec<usize>,
    pub running_cost: f64,
    pub terminal_cost: f64,
}

impl Trajectory {
    pub fn cost(&self) -> f64 {
        self.running_cost + self.terminal_cost
    }
}

#[derive(Debug, Clone)]
pub struct RolloutReport {
    pub trajectories: Vec<Trajectory>,
    /// `control_counts[i][c]`: how often candidate `c` was applied at step `i`.
    pub control_counts: Vec<Vec<u32>>,
    pub work: WorkCounter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub mean_terminal: f64,
}

impl RolloutReport {
    pub fn costs(&self) -> Vec<f64> {
        self.trajectories.iter().map(Trajectory::cost).collect()
    }

    pub fn mean_cost(&self) -> f64 {
        mean(&self.costs())
    }

    pub fn terminal_states(&self) -> Vec<&DVector<f64>> {
        self.trajectories
            .iter()
            .map(|t| t.states.last().expect("nonempty trajectory"))
            .collect()
    }

    pub fn summary(&self) -> CostSummary {
        let costs = self.costs();
        let m = mean(&costs);
        let var = if costs.len() > 1 {
            costs.iter().map(|c| (c - m) * (c - m)).sum::<f64>() / (costs.len() - 1) as f64
        } else {
            0.0
        };
        CostSummary {
            mean: m,
            std_dev: var.sqrt(),
            min: costs.iter().copied().fold(f64::INFINITY, f64::min),
            max: costs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_terminal: mean(
                &self
                    .trajectories
                    .iter()
                    .map(|t| t.terminal_cost)
                    .collect::<Vec<_>>(),
            ),
        }
    }

    /// Per-step mean state across trajectories.
    pub fn mean_path(&self) -> Vec<DVector<f64>> {
        let steps = self.trajectories[0].states.len();
        let count = self.trajectories.len() as f64;
        (0..steps)
            .map(|i| {
                self.trajectories.iter().map(|t| &t.states[i]).fold(
                    DVector::zeros(self.trajectories[0].states[0].len()),
                    |acc, x| acc + x,
                ) / count
            })
            .collect()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn simulate(
    problem: &ControlProblem,
    grid: &TimeGrid,
    coeffs: &ValueCoefficients,
    x0: &DVector<f64>,
    seed: u64,
    index: usize,
) -> Result<Trajectory> {
    let mut rng = stream_rng(seed, index as u64);
    let dt = grid.dt();
    let mut x = x0.clone();
    let mut states = Vec::with_capacity(grid.steps() + 1);
    let mut controls = Vec::with_capacity(grid.steps());
    let mut running = 0.0;
    states.push(x.clone());
    for i in 0..grid.steps() {
        let t = grid.time(i);
        let c = target_policy(problem, t, &x, coeffs.alpha(i + 1)?, coeffs.domain())?;
        let u = &problem.control_candidates()[c];
        running += problem.running_cost(t, &x, u) * dt;
        let drift = problem.drift(t, &x, u);
        let w = brownian_increment(&mut rng, problem.state_dim(), dt);
        x = euler_maruyama_step(problem, t, &x, &drift, &w, dt);
        states.push(x.clone());
        controls.push(c);
    }
    let terminal_cost = problem.terminal_cost(&x);
    Ok(Trajectory {
        states,
        controls,
        running_cost: running,
        terminal_cost,
    })
}

/// Simulates `count` independent closed-loop trajectories from `x0` applying the
/// target policy built from `α_{i+1}` at step `i`. Trajectory `k` draws its noise
/// from stream `k` of `seed`, so the result does not depend on scheduling.
pub fn rollout_policy(
    problem: &ControlProblem,
    grid: &TimeGrid,
    coeffs: &ValueCoefficients,
    x0: &DVector<f64>,
    count: usize,
    seed: u64,
) -> Result<RolloutReport> {
    if count == 0 {
        return Err(Error::param("rollout_count", "must be at least 1"));
    }
    if coeffs.steps() < grid.steps() {
        return Err(Error::MissingCoefficients(coeffs.steps() + 1));
    }
    let run = |k: usize| simulate(problem, grid, coeffs, x0, seed, k);
    #[cfg(feature = "parallel")]
    let trajectories: Result<Vec<Trajectory>> = {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let trajectories: Result<Vec<Trajectory>> = (0..count).map(run).collect();
    let trajectories = trajectories?;

    let n_candidates = problem.control_candidates().len();
    let mut control_counts = vec![vec![0u32; n_candidates]; grid.steps()];
    for t in &trajectories {
        for (i, &c) in t.controls.iter().enumerate() {
            control_counts[i][c] += 1;
        }
    }
    let steps = (count * grid.steps()) as u64;
    let work = WorkCounter {
        sde_steps: steps,
        policy_calls: steps,
        candidate_evals: steps * n_candidates as u64,
        ..Default::default()
    };
    Ok(RolloutReport {
        trajectories,
        control_counts,
        work,
    })
}
