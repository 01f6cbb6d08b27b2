//! Forward-backward stochastic optimal control on branch-sampled trees.
//!
//! A forward pass grows a tree of Euler-Maruyama paths with RRT-style
//! node selection. A backward pass fits per-step value functions by weighted
//! least squares on drift-corrected BSDE targets, with paths reweighted by a
//! softmin over a cost-to-go heuristic. The best paths are kept and the tree is
//! regrown on the next iteration.

pub mod backward;
pub mod basis;
pub mod error;
pub mod forward;
pub mod problem;
pub mod rng;
pub mod solver;
pub mod tree;
pub mod work;

pub use backward::{backward_pass, lambda_search, BackwardArtifacts, BackwardConfig, Lambda};
pub use basis::{QuadraticForm, ValueCoefficients};
pub use error::{Error, ErrorCategory, Result};
pub use forward::{forward_expand, ForwardConfig};
pub use problem::{BoxRegion, ControlProblem, TimeGrid};
pub use solver::config::{Mode, ProblemKind, SolverConfig};
pub use solver::report::RunReport;
pub use solver::rollout::{rollout_policy, RolloutReport};
pub use solver::{fbrrt_solve, Solver};
pub use tree::BranchTree;
