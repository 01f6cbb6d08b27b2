//! Two-method comparison over shared initial states and seeds.
//!
//! Per initial state, every accumulated-min cost is divided by the largest
//! mean rollout cost either method reached on that state. Curves are then
//! resampled on a shared runtime axis: `[0, t_shared]` split into equal
//! buckets, where `t_shared` is the smallest total work of any run on that
//! state. A run that has not finished an iteration by a bucket counts as 1.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::BoxRegion;
use crate::rng::{stream_rng, streams};
use crate::solver::config::SolverConfig;
use crate::solver::report::RunReport;
use crate::solver::Solver;

/// All runs of one method from one initial state.
#[derive(Debug, Clone)]
pub struct StateRuns {
    pub initial_state: Vec<f64>,
    pub runs: Vec<RunReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketRow {
    pub state: usize,
    pub method: String,
    pub seed: u64,
    pub bucket: usize,
    /// Bucket end as a fraction of the shared runtime.
    pub runtime_fraction: f64,
    pub work_units: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    pub state: usize,
    pub initial_state: Vec<f64>,
    pub shared_work: u64,
    /// Median normalized cost per bucket, first method.
    pub median_a: Vec<f64>,
    pub median_b: Vec<f64>,
    /// Median of `a` at the last bucket is at most that of `b`.
    pub a_not_worse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub labels: [String; 2],
    pub buckets: usize,
    pub rows: Vec<BucketRow>,
    pub states: Vec<StateSummary>,
}

impl Comparison {
    /// States where the first method is not worse at the final bucket.
    pub fn wins(&self) -> usize {
        self.states.iter().filter(|s| s.a_not_worse).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Divides each accumulated-min sequence by the largest raw cost across all
/// `costs` sequences.
pub fn normalized_accumulated_min(costs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let scale = costs
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    costs
        .iter()
        .map(|c| {
            super::report::accumulated_min(c)
                .into_iter()
                .map(|v| v / scale)
                .collect()
        })
        .collect()
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len();
    if m % 2 == 1 {
        xs[m / 2]
    } else {
        0.5 * (xs[m / 2 - 1] + xs[m / 2])
    }
}

/// Normalized value of one run at each bucket end.
fn bucket_values(curve: &[(u64, f64)], edges: &[f64]) -> Vec<f64> {
    edges
        .iter()
        .map(|&edge| {
            curve
                .iter()
                .take_while(|(w, _)| *w as f64 <= edge)
                .last()
                .map_or(1.0, |&(_, v)| v)
        })
        .collect()
}

pub fn comparison_report(
    labels: [&str; 2],
    a: &[StateRuns],
    b: &[StateRuns],
    buckets: usize,
) -> Result<Comparison> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param(
            "comparison",
            "both report sets must be nonempty",
        ));
    }
    if buckets == 0 {
        return Err(Error::param("compare_buckets", "must be at least 1"));
    }
    if a.len() != b.len()
        || a.iter()
            .zip(b)
            .any(|(x, y)| x.initial_state != y.initial_state)
    {
        return Err(Error::MismatchedInitialStates);
    }
    let mut rows = Vec::new();
    let mut states = Vec::new();
    for (s, (sa, sb)) in a.iter().zip(b).enumerate() {
        if sa.runs.is_empty() || sb.runs.is_empty() {
            return Err(Error::param("comparison", format!("state {s} has no runs")));
        }
        let all: Vec<&RunReport> = sa.runs.iter().chain(&sb.runs).collect();
        let raw: Vec<Vec<f64>> = all.iter().map(|r| r.mean_costs()).collect();
        let normalized = normalized_accumulated_min(&raw);
        let shared = all
            .iter()
            .map(|r| r.iterations.last().map_or(0, |it| it.cumulative_work_units))
            .min()
            .unwrap_or(0);
        let edges: Vec<f64> = (1..=buckets)
            .map(|k| shared as f64 * k as f64 / buckets as f64)
            .collect();
        let mut per_method: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
        for (idx, (run, norm)) in all.iter().zip(&normalized).enumerate() {
            let method = usize::from(idx >= sa.runs.len());
            let curve: Vec<(u64, f64)> = run
                .iterations
                .iter()
                .zip(norm)
                .map(|(it, &v)| (it.cumulative_work_units, v))
                .collect();
            let values = bucket_values(&curve, &edges);
            for (k, &v) in values.iter().enumerate() {
                rows.push(BucketRow {
                    state: s,
                    method: labels[method].to_string(),
                    seed: run.seed,
                    bucket: k + 1,
                    runtime_fraction: (k + 1) as f64 / buckets as f64,
                    work_units: edges[k],
                    normalized: v,
                });
            }
            per_method[method].push(values);
        }
        let medians: Vec<Vec<f64>> = per_method
            .iter()
            .map(|runs| {
                (0..buckets)
                    .map(|k| median(&mut runs.iter().map(|v| v[k]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        states.push(StateSummary {
            state: s,
            initial_state: sa.initial_state.clone(),
            shared_work: shared,
            a_not_worse: medians[0][buckets - 1] <= medians[1][buckets - 1],
            median_a: medians[0].clone(),
            median_b: medians[1].clone(),
        });
    }
    Ok(Comparison {
        labels: [labels[0].to_string(), labels[1].to_string()],
        buckets,
        rows,
        states,
    })
}

/// Initial states for a comparison, drawn uniformly from the configured box
/// (default: the problem's roi).
pub fn comparison_states(config: &SolverConfig) -> Result<Vec<Vec<f64>>> {
    let roi = config.build_problem()?.roi().clone();
    let region = BoxRegion::new(
        config.compare_state_lower.clone().unwrap_or(roi.lower),
        config.compare_state_upper.clone().unwrap_or(roi.upper),
    )?;
    let mut rng = stream_rng(config.seed, streams::COMPARE_STATES);
    Ok((0..config.compare_states)
        .map(|_| region.sample(&mut rng).iter().copied().collect())
        .collect())
}

/// Runs both configs on every (state, seed) pair. States, seed count and
/// bucket count come from `a`; seeds are `a.seed + k`.
pub fn run_comparison(a: &SolverConfig, b: &SolverConfig) -> Result<Comparison> {
    if a.problem != b.problem {
        return Err(Error::Config(
            "compared configs must use the same problem".into(),
        ));
    }
    let states = comparison_states(a)?;
    let seeds: Vec<u64> = (0..a.compare_seeds as u64).map(|k| a.seed + k).collect();
    let jobs: Vec<(usize, usize, u64)> = (0..states.len())
        .flat_map(|s| {
            seeds
                .iter()
                .flat_map(move |&seed| [(s, 0usize, seed), (s, 1, seed)])
        })
        .collect();
    let run = |&(s, m, seed): &(usize, usize, u64)| -> Result<RunReport> {
        let mut cfg = if m == 0 { a.clone() } else { b.clone() };
        cfg.seed = seed;
        cfg.initial_state = Some(states[s].clone());
        cfg.run_id = format!("{}-s{s}-seed{seed}", cfg.run_id);
        Solver::new(cfg)?.run()
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Result<RunReport>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<RunReport>> = jobs.iter().map(run).collect();

    let mut sets: [Vec<StateRuns>; 2] = [Vec::new(), Vec::new()];
    for set in &mut sets {
        *set = states
            .iter()
            .map(|x| StateRuns {
                initial_state: x.clone(),
                runs: Vec::new(),
            })
            .collect();
    }
    for (&(s, m, _), result) in jobs.iter().zip(results) {
        sets[m][s].runs.push(result?);
    }
    let labels = [a.mode.as_str(), b.mode.as_str()];
    let labels = if labels[0] == labels[1] {
        ["a", "b"]
    } else {
        labels
    };
    comparison_report(labels, &sets[0], &sets[1], a.compare_buckets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_run_example() {
        let out = normalized_accumulated_min(&[vec![4.0, 2.0, 2.0]]);
        assert_eq!(out, vec![vec![1.0, 0.5, 0.5]]);
    }

    #[test]
    fn scale_is_shared_across_runs() {
        let out = normalized_accumulated_min(&[vec![2.0, 1.0], vec![4.0, 3.0]]);
        assert_eq!(out, vec![vec![0.5, 0.25], vec![1.0, 0.75]]);
    }

    #[test]
    fn buckets_step_through_curve() {
        let curve = [(10, 0.8), (20, 0.5), (30, 0.4)];
        assert_eq!(
            bucket_values(&curve, &[5.0, 10.0, 25.0, 30.0]),
            vec![1.0, 0.8, 0.5, 0.4]
        );
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
