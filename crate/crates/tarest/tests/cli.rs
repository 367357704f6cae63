//! End-to-end checks of the command-line binary: every subcommand once, the
//! error contract, and byte-level determinism across thread counts.

use std::path::Path;
use std::process::{Command, Output};

fn tarest() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tarest"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("experiment.toml");
    std::fs::write(
        &path,
        r#"
        [model]
        regimes = ["0.5*x", "-0.5*x"]
        theta_boxes = [[0.1, 0.9]]

        [noise]
        family = "gaussian"
        sigma = 1.0

        [experiment]
        theta_true = 0.5
        master_seed = 42
        n_list = [60, 90]
        replications = 4
        limit_draws = 30
        burn_in = 50
        "#,
    )
    .unwrap();
    path
}

fn assert_success(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed: {}\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn simulate_profile_estimate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out_dir = dir.path().join("out");

    let out = tarest()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_success(&out, "simulate");
    let trajectory = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    let mut lines = trajectory.lines();
    assert_eq!(lines.next(), Some("t,x"));
    // n defaults to the last n_list entry: n+1 state rows.
    assert_eq!(lines.count(), 91);

    let out = tarest()
        .args(["profile", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_success(&out, "profile");
    let profile = std::fs::read_to_string(out_dir.join("profile.csv")).unwrap();
    assert!(profile.starts_with("interval_left,interval_right,log_likelihood\n"));

    let out = tarest()
        .args(["estimate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .arg(out_dir.join("trajectory.csv"))
        .output()
        .unwrap();
    assert_success(&out, "estimate");
    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("result.json")).unwrap())
            .unwrap();
    for key in ["bayes", "ml", "ml_interval", "n", "seed", "theta_true"] {
        assert!(result.get(key).is_some(), "result.json lacks {key}");
    }
    assert_eq!(result["n"], 90);
    let bayes = result["bayes"].as_f64().unwrap();
    assert!(0.1 < bayes && bayes < 0.9, "Bayes estimate {bayes} outside the box");
    let posterior = std::fs::read_to_string(out_dir.join("posterior.csv")).unwrap();
    assert!(posterior.starts_with("interval_left,interval_right,density\n"));
}

#[test]
fn limit_writes_sample_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = tarest()
        .args(["limit", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .args(["--draws", "25"])
        .output()
        .unwrap();
    assert_success(&out, "limit");

    let sample = std::fs::read_to_string(out_dir.join("limit_sample.txt")).unwrap();
    let values: Vec<f64> = sample.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 25);

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("limit_meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["draws"], 25);
    assert_eq!(meta["seed"], 42);
    assert_eq!(meta["delta0"].as_f64().unwrap(), -0.5);
    assert!(meta["lambda"].as_f64().unwrap() > 0.0);
}

#[test]
fn check_reports_conditions_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = tarest().args(["check", "--config"]).arg(&config).output().unwrap();
    assert_success(&out, "check");
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("check stdout is JSON");
    let items = report["items"].as_array().unwrap();
    assert!(!items.is_empty());
    for item in items {
        assert_eq!(item["status"], "pass", "unexpected verdict in {item}");
    }
}

#[test]
fn mc_outputs_are_bit_identical_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let mut outputs = Vec::new();
    for (run, jobs) in [("a", "1"), ("b", "3")] {
        let out_dir = dir.path().join(run);
        let out = tarest()
            .args(["mc", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out_dir)
            .args(["--jobs", jobs])
            .output()
            .unwrap();
        assert_success(&out, "mc");
        outputs.push(
            ["replications.csv", "limit_sample.txt", "summary.json"]
                .map(|name| std::fs::read(out_dir.join(name)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1], "mc outputs differ between --jobs 1 and --jobs 3");
}

#[test]
fn seed_override_changes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let read = |name: &str| -> String {
        let out_dir = dir.path().join(name);
        let out = tarest()
            .args(["simulate", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out_dir)
            .args(["--seed", name])
            .output()
            .unwrap();
        assert_success(&out, "simulate");
        std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap()
    };
    assert_ne!(read("7"), read("8"), "different seeds must give different paths");
}

#[test]
fn errors_leave_as_machine_readable_json() {
    // Missing config file.
    let out = tarest()
        .args(["check", "--config", "/nonexistent/config.toml"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("stderr is a JSON object");
    assert_eq!(err["kind"], "io");
    assert!(err["error"].as_str().unwrap().contains("config"));

    // Config that parses but fails validation: empty n_list is fine, but a
    // malformed regime expression is caught when the model is built.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        r#"
        [model]
        regimes = ["0.5*x", "-0.5*"]
        theta_boxes = [[0.1, 0.9]]

        [noise]
        family = "gaussian"
        sigma = 1.0

        [experiment]
        theta_true = 0.5
        master_seed = 1
        "#,
    )
    .unwrap();
    let out = tarest()
        .args(["simulate", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err.get("kind").is_some() && err.get("error").is_some());
}
