//! The `stablesde` binary: exit codes, output schemas, reproducibility and config files.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stablesde"));
    cmd.env_remove("STABLESDE_SEED")
        .env_remove("STABLESDE_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SIMULATE: [&str; 11] = [
    "simulate",
    "--alpha",
    "1.5",
    "--n",
    "3",
    "--horizon",
    "0.05",
    "--step",
    "0.01",
    "--seed",
    "9",
];

#[test]
fn help_is_available_for_every_subcommand() {
    for sub in ["classify", "simulate", "oracle-eval", "validate", "run"] {
        let out = run(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert!(stdout(&out).contains("Usage"), "{sub}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    assert_eq!(
        run(&["classify", "--alpha", "3", "--sigma", "const:c=1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["classify", "--alpha", "1.5", "--sigma", "power:c=1,p=2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["oracle-eval", "--op", "no-such-op", "--x", "0.5"])
            .status
            .code(),
        Some(2)
    );
    let out = run(&["validate", "--suite", "no_such_suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn classify_reports_both_questions() {
    let out = run(&["classify", "--alpha", "1.5", "--sigma", "power:c=1,theta=2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["entrance"]["+-inf"]["status"], "tick");
    for side in ["+inf", "-inf", "+-inf"] {
        assert_eq!(v["explosion"][side]["status"], "cross", "{side}");
    }
}

#[test]
fn simulate_is_byte_identical_for_a_seed() {
    let a = run(&SIMULATE);
    let b = run(&SIMULATE);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema_version=1"));
    assert!(lines.next().unwrap().contains("seed=9"));
    assert_eq!(lines.next(), Some("path,t,value,killed_at"));
    assert_eq!(lines.count(), 3 * 6);
    let mut other = SIMULATE;
    other[10] = "10";
    assert_ne!(run(&other).stdout, a.stdout);
}

#[test]
fn seed_is_read_from_the_environment() {
    let args: Vec<&str> = SIMULATE[..9].to_vec();
    let from_env = bin()
        .args(&args)
        .env("STABLESDE_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(from_env.stdout, run(&SIMULATE).stdout);
}

#[test]
fn simulate_json_carries_config_and_paths() {
    let mut args = SIMULATE.to_vec();
    args.extend(["--format", "json"]);
    let out = run(&args);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["paths"].as_array().unwrap().len(), 3);
}

#[test]
fn oracle_eval_outputs() {
    let out = run(&["oracle-eval", "--op", "h", "--alpha", "1.5", "--x", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v["value"].as_f64().unwrap() > 0.0);
    let list = run(&["oracle-eval", "--op", "list"]);
    assert_eq!(list.status.code(), Some(0));
    assert!(stdout(&list).contains("sp-exit-atom"));
    let atom = run(&[
        "oracle-eval",
        "--op",
        "sp-exit-atom",
        "--alpha",
        "1.5",
        "--rho",
        "0.3333333333333333",
        "--z",
        "-3",
    ]);
    let v: Value = serde_json::from_str(&stdout(&atom)).unwrap();
    assert_eq!(v["location"], 1.0);
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-9, "{v}");
}

#[test]
fn validate_exit_code_follows_the_outcome() {
    let pass = run(&["validate", "--suite", "perpetual", "--n", "200"]);
    assert_eq!(pass.status.code(), Some(0));
    let text = stdout(&pass);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["suite"], "perpetual");
        assert_eq!(v["pass"], true);
        assert!(v.get("runtime_secs").is_none());
    }
    assert!(String::from_utf8(pass.stderr).unwrap().contains("PASS"));
    assert_eq!(
        run(&["validate", "--suite", "perpetual", "--n", "200"]).stdout,
        pass.stdout
    );
    // Two hundred paths cannot meet the KS threshold.
    let fail = run(&["validate", "--suite", "overshoot", "--n", "200"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8(fail.stderr).unwrap().contains("FAIL"));
}

#[test]
fn run_config_round_trips_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("paths.csv");
    let cfg_path = dir.path().join("run.json");
    let mut args = SIMULATE.to_vec();
    let out_str = out_path.to_str().unwrap();
    args.extend(["-o", out_str]);
    assert_eq!(run(&args).status.code(), Some(0));
    let direct = std::fs::read(&out_path).unwrap();
    let cfg = serde_json::json!({
        "subcommand": "simulate", "alpha": 1.5, "n_paths": 3, "horizon": 0.05, "step": 0.01, "seed": 9,
    });
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let via_config = run(&["run", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(via_config.status.code(), Some(0));
    assert_eq!(via_config.stdout, direct);
    let printed = run(&["run", "--config", cfg_path.to_str().unwrap(), "--print"]);
    let v: Value = serde_json::from_str(&stdout(&printed)).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["sigma"], "const:c=1");
    std::fs::write(&cfg_path, r#"{"subcommand": "simulate", "colour": "red"}"#).unwrap();
    assert_eq!(
        run(&["run", "--config", cfg_path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
