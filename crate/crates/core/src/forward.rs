//! Forward sampling: RRT branch-sampled tree growth and the parallel-sampled baseline.
//!
//! Draw order for every inserted edge, all from the same generator:
//! 1. `κ_rrt ~ U[0,1)`; then either `n` uniforms for the RRT target point or
//!    one uniform layer index,
//! 2. `κ_opt ~ U[0,1)`; then one uniform index into `U^rand` when exploring,
//! 3. `n` standard normals scaled by `√Δt` for the Brownian increment.
//!
//! The baseline skips step 1.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::backward::target_policy;
use crate::basis::ValueCoefficients;
use crate::error::{Error, Result};
use crate::problem::{BoxRegion, ControlProblem, TimeGrid};
use crate::tree::{BranchTree, Edge, NodeId};
use crate::work::WorkCounter;

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardConfig {
    pub target_width: usize,
    pub eps_rrt: f64,
    pub eps_opt: f64,
    /// Weights of the nearest-neighbour metric; `None` scales each axis by the roi extent.
    pub metric_weights: Option<Vec<f64>>,
}

impl ForwardConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_width == 0 {
            return Err(Error::param("target_width", "must be at least 1"));
        }
        for (name, p) in [("eps_rrt", self.eps_rrt), ("eps_opt", self.eps_opt)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, format!("must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }

    pub fn resolved_weights(&self, roi: &BoxRegion) -> Vec<f64> {
        match &self.metric_weights {
            Some(w) => w.clone(),
            None => roi
                .lower
                .iter()
                .zip(&roi.upper)
                .map(|(lo, hi)| 1.0 / ((hi - lo) * (hi - lo)))
                .collect(),
        }
    }
}

/// `x + k Δt + σ(t, x) w`.
pub fn euler_maruyama_step(
    problem: &ControlProblem,
    t: f64,
    x: &DVector<f64>,
    drift: &DVector<f64>,
    noise: &DVector<f64>,
    dt: f64,
) -> DVector<f64> {
    x + drift * dt + problem.diffusion(t, x) * noise
}

/// `w ~ N(0, Δt I_n)`.
pub fn brownian_increment<R: Rng + ?Sized>(rng: &mut R, n: usize, dt: f64) -> DVector<f64> {
    let sd = dt.sqrt();
    DVector::from_fn(n, |_, _| sd * rng.sample::<f64, _>(StandardNormal))
}

/// With probability `eps_rrt` returns the node nearest to a uniform roi point,
/// otherwise a uniformly chosen node of the layer.
pub fn select_expansion_node<R: Rng + ?Sized>(
    tree: &BranchTree,
    i: usize,
    eps_rrt: f64,
    roi: &BoxRegion,
    weights: &[f64],
    rng: &mut R,
    work: &mut WorkCounter,
) -> Result<NodeId> {
    let layer = tree.layer(i);
    if layer.is_empty() {
        return Err(Error::EmptyLayer(i));
    }
    let kappa: f64 = rng.random();
    if eps_rrt > kappa {
        let target = roi.sample(rng);
        work.distance_evals += layer.len() as u64;
        Ok(tree.nearest(i, &target, weights)?.id)
    } else {
        Ok(layer[rng.random_range(0..layer.len())])
    }
}

/// With probability `eps_opt` (and coefficients available) applies the target policy
/// built from `α_{i+1}`; otherwise draws uniformly from `U^rand`.
#[allow(clippy::too_many_arguments)]
pub fn select_control<R: Rng + ?Sized>(
    problem: &ControlProblem,
    grid: &TimeGrid,
    i: usize,
    x: &DVector<f64>,
    coeffs: Option<&ValueCoefficients>,
    eps_opt: f64,
    rng: &mut R,
    work: &mut WorkCounter,
) -> Result<DVector<f64>> {
    let kappa: f64 = rng.random();
    match coeffs {
        Some(c) if eps_opt > kappa => {
            let alpha = c.alpha(i + 1)?;
            work.policy_calls += 1;
            work.candidate_evals += problem.control_candidates().len() as u64;
            let idx = target_policy(problem, grid.time(i), x, alpha, c.domain())?;
            Ok(problem.control_candidates()[idx].clone())
        }
        _ => {
            let set = problem.random_controls();
            Ok(set[rng.random_range(0..set.len())].clone())
        }
    }
}

fn grow_edge<R: Rng + ?Sized>(
    tree: &mut BranchTree,
    problem: &ControlProblem,
    parent: NodeId,
    control: DVector<f64>,
    rng: &mut R,
    work: &mut WorkCounter,
) -> Result<NodeId> {
    let grid = *tree.grid();
    let node = tree.node(parent)?;
    let i = node.time_index;
    let t = grid.time(i);
    let x = node.state.clone();
    let drift = problem.drift(t, &x, &control);
    let noise = brownian_increment(rng, problem.state_dim(), grid.dt());
    let next = euler_maruyama_step(problem, t, &x, &drift, &noise, grid.dt());
    work.sde_steps += 1;
    tree.add_edge(
        problem,
        parent,
        Edge {
            control,
            drift,
            noise,
        },
        next,
    )
}

/// Grows every layer `1..=N` of `tree` to `target_width` nodes.
///
/// Each outer pass walks `i = 0..N-1` and adds one node to layer `i + 1` if it is
/// still short, so nodes added earlier in the pass are eligible parents later on.
pub fn forward_expand<R: Rng + ?Sized>(
    tree: &mut BranchTree,
    problem: &ControlProblem,
    coeffs: Option<&ValueCoefficients>,
    config: &ForwardConfig,
    rng: &mut R,
) -> Result<WorkCounter> {
    config.validate()?;
    let weights = config.resolved_weights(problem.roi());
    if weights.len() != problem.state_dim() {
        return Err(Error::DimensionMismatch {
            context: "metric weights",
            expected: problem.state_dim(),
            actual: weights.len(),
        });
    }
    let grid = *tree.grid();
    let n_steps = grid.steps();
    let mut work = WorkCounter::default();
    loop {
        let mut grew = false;
        for i in 0..n_steps {
            if tree.layer(i + 1).len() >= config.target_width {
                continue;
            }
            let parent = select_expansion_node(
                tree,
                i,
                config.eps_rrt,
                problem.roi(),
                &weights,
                rng,
                &mut work,
            )?;
            let x = tree.node(parent)?.state.clone();
            let control = select_control(
                problem,
                &grid,
                i,
                &x,
                coeffs,
                config.eps_opt,
                rng,
                &mut work,
            )?;
            grow_edge(tree, problem, parent, control, rng, &mut work)?;
            grew = true;
        }
        if !grew {
            break;
        }
    }
    Ok(work)
}

/// `width` independent Euler-Maruyama chains from the root(s): chain `j` starts at
/// root `j mod |layer 0|` and every non-root node gets at most one child.
pub fn parallel_forward_baseline<R: Rng + ?Sized>(
    problem: &ControlProblem,
    grid: TimeGrid,
    roots: Vec<DVector<f64>>,
    width: usize,
    coeffs: Option<&ValueCoefficients>,
    eps_opt: f64,
    rng: &mut R,
) -> Result<(BranchTree, WorkCounter)> {
    if width == 0 {
        return Err(Error::param("width", "must be at least 1"));
    }
    let mut tree = BranchTree::new(grid, roots)?;
    let root_ids = tree.layer(0).to_vec();
    let mut work = WorkCounter::default();
    for j in 0..width {
        let mut node = root_ids[j % root_ids.len()];
        for i in 0..grid.steps() {
            let x = tree.node(node)?.state.clone();
            let control = select_control(problem, &grid, i, &x, coeffs, eps_opt, rng, &mut work)?;
            node = grow_edge(&mut tree, problem, node, control, rng, &mut work)?;
        }
    }
    Ok((tree, work))
}
