//! Iteration loop: grow, fit, evaluate, prune.

pub mod compare;
pub mod config;
pub mod oracle;
pub mod report;
pub mod rollout;

use nalgebra::DVector;

use crate::backward::{backward_pass, lambda_search, BackwardArtifacts, BackwardConfig, Lambda};
use crate::basis::{feature_count, ValueCoefficients};
use crate::error::{Error, Result};
use crate::forward::{forward_expand, parallel_forward_baseline, ForwardConfig};
use crate::problem::{ControlProblem, TimeGrid};
use crate::rng::{derive_seed, stream_rng, streams};
use crate::tree::BranchTree;

use config::{LambdaSetting, Mode, SolverConfig};
use report::{IterationReport, RunReport, TreeStats};
use rollout::{rollout_policy, RolloutReport};

/// Everything produced by one iteration, handed to the observer.
pub struct IterationOutput<'a> {
    pub report: &'a IterationReport,
    /// The fully grown tree the backward pass ran on, before pruning.
    pub tree: &'a BranchTree,
    pub artifacts: &'a BackwardArtifacts,
    pub rollout: &'a RolloutReport,
}

pub struct Solver {
    config: SolverConfig,
    problem: ControlProblem,
    grid: TimeGrid,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        let problem = config.build_problem()?;
        Solver::with_problem(config, problem)
    }

    /// Uses `problem` instead of the one named in the config.
    pub fn with_problem(config: SolverConfig, problem: ControlProblem) -> Result<Self> {
        config.validate()?;
        let grid = TimeGrid::new(problem.horizon(), config.time_grid()?.steps())?;
        if let Some(w) = &config.metric_weights {
            if w.len() != problem.state_dim() {
                return Err(Error::DimensionMismatch {
                    context: "metric weights",
                    expected: problem.state_dim(),
                    actual: w.len(),
                });
            }
        }
        Ok(Solver {
            config,
            problem,
            grid,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn problem(&self) -> &ControlProblem {
        &self.problem
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `x0` followed by `roots - 1` uniform draws from the roi.
    pub fn roots(&self) -> Vec<DVector<f64>> {
        let mut rng = stream_rng(self.config.seed, streams::ROOTS);
        let mut roots = vec![self.problem.initial_state().clone()];
        roots.extend((1..self.config.roots).map(|_| self.problem.roi().sample(&mut rng)));
        roots
    }

    pub fn run(&self) -> Result<RunReport> {
        self.run_observed(|_| Ok(()))
    }

    pub fn run_observed<F>(&self, mut observer: F) -> Result<RunReport>
    where
        F: FnMut(IterationOutput<'_>) -> Result<()>,
    {
        let cfg = &self.config;
        let n = self.problem.state_dim();
        let p = feature_count(n);
        let rollout_seed = derive_seed(cfg.seed, streams::ROLLOUT);
        let search_seed = derive_seed(cfg.seed, streams::LAMBDA_SEARCH);
        let roots = self.roots();

        let mut tree = BranchTree::new(self.grid, roots.clone())?;
        let mut coeffs: Option<ValueCoefficients> = None;
        let mut iterations = Vec::with_capacity(cfg.iterations);
        let mut best = (f64::INFINITY, 0usize);
        let mut cumulative = 0u64;

        for it in 1..=cfg.iterations {
            let step = || -> Result<_> {
                let mut rng = stream_rng(cfg.seed, streams::forward(it));
                let eps_opt = if coeffs.is_some() { cfg.eps_opt } else { 0.0 };
                let (grown, mut work) = match cfg.mode {
                    Mode::Fbrrt => {
                        let mut grown = tree.clone();
                        let forward = ForwardConfig {
                            target_width: cfg.particles,
                            eps_rrt: if it == 1 {
                                cfg.eps_rrt_first
                            } else {
                                cfg.eps_rrt
                            },
                            eps_opt,
                            metric_weights: cfg.metric_weights.clone(),
                        };
                        let work = forward_expand(
                            &mut grown,
                            &self.problem,
                            coeffs.as_ref(),
                            &forward,
                            &mut rng,
                        )?;
                        (grown, work)
                    }
                    Mode::ParallelBaseline => parallel_forward_baseline(
                        &self.problem,
                        self.grid,
                        roots.clone(),
                        cfg.particles,
                        coeffs.as_ref(),
                        eps_opt,
                        &mut rng,
                    )?,
                };
                let lambda = match cfg.mode {
                    Mode::Fbrrt => cfg.lambda.clone(),
                    Mode::ParallelBaseline => LambdaSetting::Fixed(Lambda::Uniform),
                };
                let (artifacts, candidates) = match lambda {
                    LambdaSetting::Fixed(lambda) => (
                        backward_pass(
                            &self.problem,
                            &grown,
                            &BackwardConfig {
                                lambda,
                                ridge: cfg.ridge(),
                            },
                        )?,
                        Vec::new(),
                    ),
                    LambdaSetting::Search(grid) => lambda_search(
                        &self.problem,
                        &grown,
                        &grid,
                        cfg.ridge(),
                        cfg.rollout_count,
                        search_seed,
                    )?,
                };
                work.add(&artifacts.work);
                let rollout = rollout_policy(
                    &self.problem,
                    &self.grid,
                    &artifacts.coefficients,
                    self.problem.initial_state(),
                    cfg.rollout_count,
                    rollout_seed,
                )?;
                Ok((grown, work, artifacts, candidates, rollout))
            };
            let (grown, work, artifacts, candidates, rollout) =
                step().map_err(|e| Error::Iteration {
                    iteration: it,
                    source: Box::new(e),
                })?;

            let cost = rollout.summary();
            if cost.mean < best.0 {
                best = (cost.mean, it);
            }
            let units = work.units(n, p);
            cumulative += units;
            let mut stats = TreeStats::of(&grown);
            let next_tree = match cfg.mode {
                Mode::Fbrrt if it < cfg.iterations => Some(
                    grown
                        .prune(&artifacts.rho, cfg.keep_fraction)
                        .map_err(|e| Error::Iteration {
                            iteration: it,
                            source: Box::new(e),
                        })?,
                ),
                _ => None,
            };
            stats.retained = next_tree.as_ref().map_or(0, BranchTree::len);
            let report = IterationReport {
                iteration: it,
                cost,
                accumulated_min: best.0,
                value_at_x0: artifacts
                    .coefficients
                    .value(0, self.problem.initial_state())?,
                work,
                work_units: units,
                cumulative_work_units: cumulative,
                tree: stats,
                lambda: artifacts.lambda,
                lambda_candidates: candidates,
                effective_sample_size: artifacts.effective_sample_size.clone(),
                residuals: artifacts.residuals.clone(),
                control_usage: control_usage(&rollout),
            };
            observer(IterationOutput {
                report: &report,
                tree: &grown,
                artifacts: &artifacts,
                rollout: &rollout,
            })?;
            iterations.push(report);
            if let Some(t) = next_tree {
                tree = t;
            }
            coeffs = Some(artifacts.coefficients);
        }

        Ok(RunReport {
            run_id: cfg.run_id.clone(),
            seed: cfg.seed,
            config: cfg.clone(),
            problem: self.problem.name().to_string(),
            steps: self.grid.steps(),
            dt: self.grid.dt(),
            initial_state: self.problem.initial_state().iter().copied().collect(),
            iterations,
            best_iteration: best.1,
            final_coefficients: coeffs.expect("at least one iteration"),
        })
    }
}

fn control_usage(rollout: &RolloutReport) -> Vec<f64> {
    let k = rollout.control_counts.first().map_or(0, Vec::len);
    let mut totals = vec![0.0; k];
    let mut all = 0.0;
    for counts in &rollout.control_counts {
        for (t, &c) in totals.iter_mut().zip(counts) {
            *t += c as f64;
            all += c as f64;
        }
    }
    totals.iter().map(|t| t / all.max(1.0)).collect()
}

/// Runs the configured solver and returns its report.
pub fn fbrrt_solve(config: &SolverConfig) -> Result<RunReport> {
    Solver::new(config.clone())?.run()
}
