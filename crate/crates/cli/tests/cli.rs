use std::fs;
use std::path::Path;
use std::process::Command;

fn fbrrt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fbrrt"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.conf");
    fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = "problem = double_integrator\nrun_id = small\nparticles = 32\niterations = 3\nrollout_count = 16\n";

#[test]
fn run_writes_report_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let status = fbrrt()
        .args([
            "run",
            config.to_str().unwrap(),
            "steps=10",
            "--seed",
            "4",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("small/report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 4);
    assert_eq!(report["steps"], 10);
    assert_eq!(report["iterations"].as_array().unwrap().len(), 3);
    for kind in ["tree", "trajectories", "controls"] {
        assert!(out.join(format!("small/2.{kind}.csv")).exists(), "{kind}");
    }
    let timing = fs::read_to_string(out.join("small/timing.csv")).unwrap();
    assert_eq!(timing.lines().count(), 4);
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let mut reports = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = fbrrt()
            .args([
                "run",
                config.to_str().unwrap(),
                "--no-dumps",
                "--mode",
                "parallel-baseline",
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        reports.push(fs::read(out.join("small/report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn exit_codes_follow_error_category() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "problem = teapot\n");
    let out = fbrrt()
        .args(["run", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("teapot"));

    let config = write_config(dir.path(), SMALL);
    let out = fbrrt()
        .args(["run", config.to_str().unwrap(), "eps_opt=2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let missing = fbrrt()
        .args(["run", "/nonexistent/config"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn compare_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.conf");
    let b = dir.path().join("b.conf");
    fs::write(
        &a,
        format!("{SMALL}compare_states = 2\ncompare_seeds = 2\ncompare_buckets = 4\n"),
    )
    .unwrap();
    fs::write(&b, format!("{SMALL}mode = parallel-baseline\n")).unwrap();
    let out = dir.path().join("cmp");
    let output = fbrrt()
        .args(["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let csv = fs::read_to_string(out.join("comparison.csv")).unwrap();
    // header + 2 states × 2 methods × 2 seeds × 4 buckets
    assert_eq!(csv.lines().count(), 1 + 32);
    assert!(String::from_utf8_lossy(&output.stdout).contains("/2 states"));
}

#[test]
fn oracle_suite_passes() {
    let out = fbrrt().arg("oracle").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("PASS").count(), 3, "{text}");
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let config = fbrrt_config_parse(&text);
        assert!(config.is_ok(), "{}: {:?}", path.display(), config.err());
    }
}

fn fbrrt_config_parse(text: &str) -> Result<(), String> {
    fbrrt::SolverConfig::parse(text)
        .and_then(|c| c.build_problem().map(|_| ()))
        .map_err(|e| e.to_string())
}
