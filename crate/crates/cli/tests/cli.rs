use std::process::{Command as Process, Output};

use qig_cli::{run, Command, RunConfig, Verdict, SCHEMA};

fn qig(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_qig"))
        .args(args)
        .env("QIG_THREADS", "2")
        .output()
        .expect("binary runs")
}

#[test]
fn passing_run_prints_report_and_exits_zero() {
    let out = qig(&["legendre", "--samples", "3", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["config"]["samples"], 3);
    assert!(v["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn tightened_tolerance_fails_with_exit_one() {
    let out = qig(&["duality-scan", "--samples", "3", "--f", "bkm,sld", "--tolerance", "duality_pass=1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("FAIL duality-scan/bkm/duality_residual"), "{stderr}");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "fail");
    let bound = v["tolerances"]["duality_pass"].as_f64().unwrap();
    assert!((bound / 1e-30 - 1.0).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["legendre", "--dim", "1"],
        vec!["legendre", "--samples", "0"],
        vec!["monotonicity", "--f", "nope"],
        vec!["flatness", "--tolerance", "nonsense=1"],
        vec!["flatness", "--tolerance", "christoffel"],
        vec!["no-such-command"],
    ] {
        let out = qig(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn unwritable_output_exits_three() {
    let out = qig(&["legendre", "--samples", "2", "--out", "/nonexistent-dir/report.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn json_and_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("w.csv");
    let out = qig(&[
        "bkm-equivalence",
        "--samples",
        "4",
        "--out",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["command"], "bkm-equivalence");

    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["experiment", "subject", "quantity", "value"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), v["witness_table"].as_array().unwrap().len());
    assert!(rows.iter().all(|r| r[3].parse::<f64>().is_ok()));
}

#[test]
fn all_runs_every_experiment() {
    let mut config = RunConfig::new(Command::All);
    config.samples = Some(3);
    config.trials = 10;
    let report = run(&config).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);
    for command in Command::EXPERIMENTS {
        let prefix = format!("{}/", command.as_str());
        assert!(report.checks.iter().any(|c| c.name.starts_with(&prefix)), "{prefix}");
    }
}
