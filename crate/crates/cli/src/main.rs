use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use fbrrt::solver::compare::run_comparison;
use fbrrt::solver::oracle::validation_suite;
use fbrrt::solver::report::{
    write_control_counts, write_report, write_timing, write_trajectory_dump, write_tree_dump,
};
use fbrrt::{Error, Result, Solver, SolverConfig};

/// Trajectories written per iteration dump.
const DUMPED_TRAJECTORIES: usize = 32;

#[derive(Parser)]
#[command(
    name = "fbrrt",
    version,
    about = "Branch-sampled FBSDE solver for stochastic optimal control"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write its report.
    Run {
        /// Config file (`key = value` lines).
        config: PathBuf,
        /// Overrides, e.g. `particles=128`.
        overrides: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; reports go to `<out>/<run_id>/`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `fbrrt` or `parallel-baseline`.
        #[arg(long)]
        mode: Option<String>,
        /// Skip per-iteration tree and trajectory CSVs.
        #[arg(long)]
        no_dumps: bool,
    },
    /// Run two configs over shared initial states and seeds.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the reference oracles.
    Oracle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(path: &Path, overrides: &[String]) -> Result<SolverConfig> {
    let text = fs::read_to_string(path)?;
    let mut config = SolverConfig::parse(&text)?;
    for kv in overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{kv}` is not key=value")))?;
        config.set(k.trim(), v.trim())?;
    }
    Ok(config)
}

fn run(
    mut config: SolverConfig,
    seed: Option<u64>,
    out: Option<PathBuf>,
    mode: Option<String>,
    dumps: bool,
) -> Result<()> {
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(m) = mode {
        config.set("mode", &m)?;
    }
    let out_dir = out
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let run_id = config.run_id.clone();
    let solver = Solver::new(config)?;
    let mut seconds = Vec::new();
    let mut started = Instant::now();
    let report = solver.run_observed(|it| {
        seconds.push(started.elapsed().as_secs_f64());
        let r = it.report;
        println!(
            "iter {:>3}  mean {:>10.4}  std {:>9.4}  best {:>10.4}  V(x0) {:>9.4}  work {:>12}",
            r.iteration,
            r.cost.mean,
            r.cost.std_dev,
            r.accumulated_min,
            r.value_at_x0,
            r.work_units
        );
        if dumps {
            write_tree_dump(&out_dir, &run_id, r.iteration, it.tree, &it.artifacts.rho)?;
            write_trajectory_dump(
                &out_dir,
                &run_id,
                r.iteration,
                it.rollout,
                DUMPED_TRAJECTORIES,
            )?;
            write_control_counts(&out_dir, &run_id, r.iteration, it.rollout)?;
        }
        started = Instant::now();
        Ok(())
    })?;
    let path = write_report(&out_dir, &report)?;
    write_timing(&out_dir, &run_id, &seconds)?;
    println!("report: {}", path.display());
    Ok(())
}

fn compare(
    mut a: SolverConfig,
    b: SolverConfig,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<()> {
    if let Some(s) = seed {
        a.seed = s;
    }
    let out_dir = out.unwrap_or_else(|| PathBuf::from("out"));
    let cmp = run_comparison(&a, &b)?;
    fs::create_dir_all(&out_dir)?;
    cmp.write_csv(fs::File::create(out_dir.join("comparison.csv"))?)?;
    fs::write(
        out_dir.join("comparison.json"),
        serde_json::to_string_pretty(&cmp.states)?,
    )?;
    for s in &cmp.states {
        println!(
            "state {:>2} {:?}: {} {:.4}  {} {:.4}",
            s.state,
            s.initial_state,
            cmp.labels[0],
            s.median_a.last().copied().unwrap_or(f64::NAN),
            cmp.labels[1],
            s.median_b.last().copied().unwrap_or(f64::NAN),
        );
    }
    println!(
        "{} not worse than {} at the final bucket in {}/{} states",
        cmp.labels[0],
        cmp.labels[1],
        cmp.wins(),
        cmp.states.len()
    );
    Ok(())
}

fn oracle(seed: u64) -> Result<bool> {
    let mut ok = true;
    for check in validation_suite(seed)? {
        println!(
            "{} {}: {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
        ok &= check.passed;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            overrides,
            seed,
            out,
            mode,
            no_dumps,
        } => load(&config, &overrides).and_then(|c| run(c, seed, out, mode, !no_dumps)),
        Command::Compare { a, b, seed, out } => {
            load(&a, &[]).and_then(|ca| load(&b, &[]).and_then(|cb| compare(ca, cb, seed, out)))
        }
        Command::Oracle { seed } => match oracle(seed) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.category().exit_code() as u8)
        }
    }
}
