use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures");

fn vrp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vrp-qaoa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    format!("{FIXTURES}/{name}")
}

/// Small, fast sweep config in `dir`.
fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("config.json");
    let text = format!(
        r#"{{
  "instance": "{}",
  "seeds": [0, 1, 2],
  "lambdas": [0.6, 0.7],
  "optimizer": {{"restarts": 2, "max_evals": 30, "final_shots": 512}},
  "output_dir": "{}"{extra}
}}"#,
        fixture("three_node.json"),
        dir.join("out").display()
    );
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_three_node() {
    let text = stdout(&vrp(&["solve", &fixture("three_node.json")]));
    assert!(text.contains("feasible optimum : 111010"), "{text}");
    assert!(text.contains("optimal cost     : 132"));
    assert!(text.contains("feasible count   : 1"));

    let json: serde_json::Value = serde_json::from_str(&stdout(&vrp(&[
        "solve",
        &fixture("three_node.json"),
        "--json",
    ])))
    .unwrap();
    assert_eq!(json["feasible_optimum"][0], "111010");
    assert_eq!(json["optimal_cost"], 132.0);
}

#[test]
fn solve_two_node() {
    let text = stdout(&vrp(&["solve", &fixture("two_node.json")]));
    assert!(text.contains("feasible optimum : 11"), "{text}");
    assert!(text.contains("optimal cost     : 10.75"));
}

#[test]
fn malformed_instance_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"distances\": [[0, 1],\n  \"vehicles\": 1\n}").unwrap();
    let out = vrp(&["solve", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "{err}");
}

#[test]
fn encode_table() {
    let text = stdout(&vrp(&["encode", &fixture("three_node.json")]));
    assert!(text.contains("penalty P  435.6"), "{text}");
    assert!(text.contains("2395.8000"));
    assert!(text.contains("energy scale s = 542.15"));
    assert!(text.contains("x1,0 + x2,0 >= 1"));
}

#[test]
fn run_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    stdout(&vrp(&["run", "--config", &cfg, "--quiet"]));
    let out = dir.path().join("out");
    let runs = fs::read_dir(out.join("runs")).unwrap().count();
    assert_eq!(runs, 3 * 3);
    let aggregate = fs::read_to_string(out.join("aggregate.csv")).unwrap();
    // Header plus one row per model and lambda.
    assert_eq!(aggregate.lines().count(), 1 + 3);
    assert!(aggregate
        .lines()
        .next()
        .unwrap()
        .starts_with("regime,model,lambda,runs,p_opt_mean"));
    let plot = fs::read_to_string(out.join("plot.csv")).unwrap();
    assert_eq!(plot.lines().count(), 1 + 3 * 3);

    let record: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(out.join("runs/regimeI_standard_seed0.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(
        record["histogram"]
            .as_object()
            .unwrap()
            .values()
            .map(|v| v.as_u64().unwrap())
            .sum::<u64>(),
        512
    );
    assert!(record["metrics"]["p_opt"].as_f64().is_some());
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let aggregate = dir.path().join("out/aggregate.csv");
    stdout(&vrp(&[
        "run", "--config", &cfg, "--quiet", "--regime", "II",
    ]));
    let first = fs::read(&aggregate).unwrap();
    stdout(&vrp(&[
        "run", "--config", &cfg, "--quiet", "--regime", "II",
    ]));
    assert_eq!(first, fs::read(&aggregate).unwrap());
}

#[test]
fn overrides_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    stdout(&vrp(&[
        "run",
        "--config",
        &cfg,
        "--quiet",
        "--ansatz",
        "constraint_aware",
        "--lambda",
        "0.7",
        "--seeds",
        "0..0",
        "--p",
        "1",
        "--shots-final",
        "100",
    ]));
    let runs: Vec<_> = fs::read_dir(dir.path().join("out/runs"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(runs.len(), 1);
    assert_eq!(
        runs[0].to_str().unwrap(),
        "regimeI_constraint_aware_lambda0.70_seed0.json"
    );
    let record: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("out/runs").join(&runs[0])).unwrap(),
    )
    .unwrap();
    assert_eq!(record["params"]["gamma"].as_array().unwrap().len(), 1);
}

#[test]
fn noisy_regime_with_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = vrp(&["run", "--config", &cfg, "--quiet", "--regime", "III"]);
    assert!(
        !out.status.success(),
        "regime III without a noise model must be rejected"
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("noise"));

    stdout(&vrp(&[
        "run",
        "--config",
        &cfg,
        "--quiet",
        "--regime",
        "III",
        "--noise-preset",
        "paper",
        "--seeds",
        "1",
        "--ansatz",
        "standard",
    ]));
    let saved: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/config.json")).unwrap())
            .unwrap();
    assert_eq!(saved["noise"]["p2"], 0.00125);
    assert_eq!(saved["noise"]["p01"], 0.001);
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("out");
    fs::write(&blocker, "not a directory").unwrap();
    let cfg = write_config(dir.path(), "");
    let out = vrp(&["run", "--config", &cfg, "--quiet"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("out"));
}

#[test]
fn circuit_dump() {
    let text = stdout(&vrp(&[
        "circuit",
        &fixture("three_node.json"),
        "--p",
        "1",
        "--lambda",
        "0.5",
        "--gamma",
        "0.3",
        "--beta",
        "0.2",
    ]));
    let gates: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    let names: Vec<&str> = gates.iter().map(|g| g["name"].as_str().unwrap()).collect();
    assert_eq!(names.iter().filter(|n| **n == "rxx").count(), 2);
    assert_eq!(names.iter().filter(|n| **n == "ryy").count(), 2);
    assert_eq!(names.iter().filter(|n| **n == "rx").count(), 2);
    assert_eq!(names.iter().filter(|n| **n == "rzz").count(), 6);
    let rx = gates.iter().find(|g| g["name"] == "rx").unwrap();
    assert!((rx["angle"].as_f64().unwrap() - 2.0 * 0.5 * 0.2).abs() < 1e-12);

    let standard: Vec<serde_json::Value> = serde_json::from_str(&stdout(&vrp(&[
        "circuit",
        &fixture("three_node.json"),
        "--ansatz",
        "standard",
    ])))
    .unwrap();
    assert_eq!(standard.iter().filter(|g| g["name"] == "h").count(), 6);
}
