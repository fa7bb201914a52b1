use std::process::Command;

use serde_json::Value;

fn monomix(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_monomix"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("report is JSON")
}

#[test]
fn usage_errors_exit_with_two() {
    let (code, _, err) = monomix(&[]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
    assert_eq!(monomix(&["analyze", "--set", "full(0"]).0, 2);
    let (code, _, err) = monomix(&["analyze", "--set", "full(30)"]);
    assert_eq!(code, 2);
    assert!(err.contains("explicit"), "{err}");
    let (code, _, err) = monomix(&["simulate", "--set", "threshold(4,3)", "--x0", "0000"]);
    assert_eq!(code, 2);
    assert!(err.contains("0000"), "{err}");
}

#[test]
fn simulate_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let report = dir.path().join("report.json");
    let (code, stdout, _) = monomix(&[
        "simulate",
        "--set",
        "threshold(5,2)",
        "--x0",
        "11000",
        "--steps",
        "1e4",
        "--seed",
        "3",
        "--thin",
        "100",
        "--out",
        csv.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,state,event");
    assert_eq!(lines.len(), 101);
    assert!(lines[1].starts_with("100,"));
    let r = json(&std::fs::read_to_string(&report).unwrap());
    assert_eq!(r["tool"], "monomix");
    assert_eq!(r["seed"], 3);
    assert_eq!(r["config"]["steps"], 10000);
    let res = &r["result"];
    let total = res["accepted"].as_u64().unwrap()
        + res["censored"].as_u64().unwrap()
        + res["held"].as_u64().unwrap();
    assert_eq!(total, 10000);
}

#[test]
fn analyze_reports_exact_quantities() {
    let dir = tempfile::tempdir().unwrap();
    let tv = dir.path().join("tv.csv");
    let (code, stdout, _) = monomix(&[
        "analyze",
        "--set",
        "full(2)",
        "--tv-out",
        tv.to_str().unwrap(),
        "--t-max",
        "3",
        "--mix",
        "--gap",
    ]);
    assert_eq!(code, 0);
    let r = json(&stdout);
    assert_eq!(r["result"]["tau_mix"], 1);
    assert!((r["result"]["spectral_gap"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(
        std::fs::read_to_string(&tv).unwrap(),
        "t,d\n0,7.5e-1\n1,2.5e-1\n2,1.25e-1\n3,6.25e-2\n"
    );
}

#[test]
fn certify_and_verify_all_pass() {
    let (code, stdout, _) = monomix(&["analyze", "--set", "random-monotone(5,0.6,9)", "--certify"]);
    assert_eq!(code, 0);
    assert_eq!(json(&stdout)["pass"], true);
    let (code, stdout, _) = monomix(&["verify-all", "--n-max", "3", "--workers", "2"]);
    assert_eq!(code, 0);
    let r = json(&stdout);
    assert_eq!(r["result"]["tester_inequality"][2]["subsets"], 256);
    assert_eq!(r["result"]["tester_inequality"][2]["failures"], 0);
}

#[test]
fn percolation_and_ising_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.txt");
    let (code, stdout, _) = monomix(&[
        "percolation",
        "--L",
        "4",
        "--steps",
        "2e4",
        "--seed",
        "1",
        "--exact",
        "--out",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r = json(&stdout);
    assert_eq!(
        r["result"]["exact"]["probability"],
        serde_json::json!({"num": 1, "den": 2})
    );
    assert_eq!(r["result"]["final_crossing"], true);
    let (_, config) =
        monomix::percolation::config_from_rows(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    assert!(monomix::percolation::has_crossing(
        &config,
        &monomix::percolation::HexLattice::new(4)
    ));

    let (code, stdout, _) = monomix(&["ising", "--n", "4", "--sweep", "0:3:1", "--transport"]);
    assert_eq!(code, 0);
    let r = json(&stdout);
    assert_eq!(r["result"]["sweep"].as_array().unwrap().len(), 4);
    assert_eq!(r["result"]["delta_strictly_decreasing"], true);
    assert_eq!(r["result"]["transport"]["monotone_sets"], 168);
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "command = \"test-monotone\"\nset = \"explicit(10,01)\"\nseed = 5\n",
    )
    .unwrap();
    let (code, stdout, _) = monomix(&["--config", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = json(&stdout);
    assert_eq!(r["seed"], 5);
    assert_eq!(r["result"]["exact"]["mismatch_count"], 1);
    assert_eq!(r["result"]["exact"]["violating_pairs"], 2);
    // command-line flags override the file
    let (_, stdout, _) = monomix(&[
        "--config",
        path.to_str().unwrap(),
        "test-monotone",
        "--seed",
        "9",
    ]);
    assert_eq!(json(&stdout)["seed"], 9);
}
