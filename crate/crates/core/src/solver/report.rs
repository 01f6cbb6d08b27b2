//! Run reports and CSV dumps.
//!
//! The JSON report holds only deterministic quantities. Wall-clock time goes
//! to a separate `timing.csv` so that two runs with one seed produce identical
//! reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::backward::LambdaCandidate;
use crate::basis::ValueCoefficients;
use crate::error::Result;
use crate::solver::config::SolverConfig;
use crate::solver::rollout::{CostSummary, RolloutReport};
use crate::tree::{BranchTree, LayerScores};
use crate::work::WorkCounter;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeStats {
    pub nodes: usize,
    pub min_width: usize,
    pub max_width: usize,
    /// Nodes kept after pruning, carried into the next iteration.
    pub retained: usize,
}

impl TreeStats {
    pub fn of(tree: &BranchTree) -> Self {
        let widths = tree.layer_widths();
        TreeStats {
            nodes: tree.len(),
            min_width: widths.iter().copied().min().unwrap_or(0),
            max_width: widths.iter().copied().max().unwrap_or(0),
            retained: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub cost: CostSummary,
    /// Best mean rollout cost so far.
    pub accumulated_min: f64,
    pub value_at_x0: f64,
    pub work: WorkCounter,
    pub work_units: u64,
    pub cumulative_work_units: u64,
    pub tree: TreeStats,
    pub lambda: Option<f64>,
    pub lambda_candidates: Vec<LambdaCandidate>,
    /// Per-layer effective sample size of the regression weights.
    pub effective_sample_size: Vec<f64>,
    /// Per-layer weighted RMS residual.
    pub residuals: Vec<f64>,
    /// Fraction of rollout steps applying each candidate, summed over time.
    pub control_usage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub run_id: String,
    pub seed: u64,
    pub config: SolverConfig,
    pub problem: String,
    pub steps: usize,
    pub dt: f64,
    pub initial_state: Vec<f64>,
    pub iterations: Vec<IterationReport>,
    /// Iteration with the lowest mean rollout cost.
    pub best_iteration: usize,
    /// Coefficients fitted in the last iteration.
    pub final_coefficients: ValueCoefficients,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn accumulated_min(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.accumulated_min).collect()
    }

    pub fn mean_costs(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.cost.mean).collect()
    }

    /// `(cumulative work units, accumulated-min cost)` per iteration.
    pub fn cost_curve(&self) -> Vec<(u64, f64)> {
        self.iterations
            .iter()
            .map(|r| (r.cumulative_work_units, r.accumulated_min))
            .collect()
    }
}

/// Running minimum of `costs`.
pub fn accumulated_min(costs: &[f64]) -> Vec<f64> {
    costs
        .iter()
        .scan(f64::INFINITY, |best, &c| {
            *best = best.min(c);
            Some(*best)
        })
        .collect()
}

pub fn dump_path(out_dir: &Path, run_id: &str, iteration: usize, kind: &str) -> PathBuf {
    out_dir.join(run_id).join(format!("{iteration}.{kind}.csv"))
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(fs::File::create(path)?)
}

pub fn write_tree_dump(
    out_dir: &Path,
    run_id: &str,
    iteration: usize,
    tree: &BranchTree,
    rho: &LayerScores,
) -> Result<PathBuf> {
    let path = dump_path(out_dir, run_id, iteration, "tree");
    tree.write_csv(std::io::BufWriter::new(create(&path)?), Some(rho))?;
    Ok(path)
}

/// One row per trajectory and time step:
/// `trajectory,time_index,x*,control_index,cost`.
pub fn write_trajectory_dump(
    out_dir: &Path,
    run_id: &str,
    iteration: usize,
    rollout: &RolloutReport,
    limit: usize,
) -> Result<PathBuf> {
    let path = dump_path(out_dir, run_id, iteration, "trajectories");
    let mut w = csv::Writer::from_writer(create(&path)?);
    let n = rollout
        .trajectories
        .first()
        .map_or(0, |t| t.states[0].len());
    let mut header = vec!["trajectory".to_string(), "time_index".into()];
    header.extend((0..n).map(|k| format!("x{k}")));
    header.extend(["control_index".to_string(), "cost".into()]);
    w.write_record(&header)?;
    for (j, traj) in rollout.trajectories.iter().take(limit).enumerate() {
        for (i, x) in traj.states.iter().enumerate() {
            let mut row = vec![j.to_string(), i.to_string()];
            row.extend(x.iter().map(|v| v.to_string()));
            row.push(
                traj.controls
                    .get(i)
                    .map_or(String::new(), |c| c.to_string()),
            );
            row.push(traj.cost().to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(path)
}

/// `time_index,candidate_0,…` counts of applied controls.
pub fn write_control_counts(
    out_dir: &Path,
    run_id: &str,
    iteration: usize,
    rollout: &RolloutReport,
) -> Result<PathBuf> {
    let path = dump_path(out_dir, run_id, iteration, "controls");
    let mut w = csv::Writer::from_writer(create(&path)?);
    let k = rollout.control_counts.first().map_or(0, Vec::len);
    let mut header = vec!["time_index".to_string()];
    header.extend((0..k).map(|c| format!("candidate_{c}")));
    w.write_record(&header)?;
    for (i, counts) in rollout.control_counts.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(counts.iter().map(u32::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(path)
}

pub fn write_report(out_dir: &Path, report: &RunReport) -> Result<PathBuf> {
    let path = out_dir.join(&report.run_id).join("report.json");
    let mut f = create(&path)?;
    f.write_all(report.to_json()?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(path)
}

/// `iteration,seconds` wall-clock time per iteration.
pub fn write_timing(out_dir: &Path, run_id: &str, seconds: &[f64]) -> Result<PathBuf> {
    let path = out_dir.join(run_id).join("timing.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["iteration", "seconds"])?;
    for (i, s) in seconds.iter().enumerate() {
        w.write_record([(i + 1).to_string(), format!("{s:.6}")])?;
    }
    w.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulated_min_is_running_minimum() {
        assert_eq!(
            accumulated_min(&[4.0, 2.0, 3.0, 1.0]),
            vec![4.0, 2.0, 2.0, 1.0]
        );
        assert!(accumulated_min(&[]).is_empty());
    }

    #[test]
    fn dump_naming() {
        let p = dump_path(Path::new("out"), "di", 3, "tree");
        assert_eq!(p, Path::new("out/di/3.tree.csv"));
    }
}
