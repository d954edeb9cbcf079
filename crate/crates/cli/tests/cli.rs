use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn spinsw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinsw"))
        .args(args)
        .arg("--quiet")
        .env_remove("SPINSW_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let o = spinsw(&a);
    let v: Value = serde_json::from_str(stdout(&o).trim()).expect("one JSON document");
    assert_eq!(v["schema"], "spinsw/1");
    (code(&o), v)
}

#[test]
fn decide_exit_codes() {
    assert_eq!(code(&spinsw(&["decide", "Z2 wr C3"])), 3);
    assert_eq!(code(&spinsw(&["decide", "Z2 wr C2"])), 0);
    assert_eq!(code(&spinsw(&["decide", "Z2 wr C4"])), 0);
    assert_eq!(code(&spinsw(&["decide", "Z2 wr C4", "--budget", "1", "--no-certificates"])), 4);
    let (c, v) = json(&["decide", "Z2 wr C2"]);
    assert_eq!(c, 0);
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["length"], 3);
}

#[test]
fn budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_spinsw"))
        .args(["decide", "Z2 wr C4", "--no-certificates", "--quiet"])
        .env("SPINSW_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&spinsw(&["decide"])), 2);
    assert_eq!(code(&spinsw(&["frobnicate", "Z2 wr C2"])), 2);
    let o = spinsw(&["decide", "Z2 wr"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 6"));
    assert_eq!(code(&spinsw(&["decide", "Q8 wr C2"])), 2);
    assert_eq!(code(&spinsw(&["construct", "--method", "trivial", "Z2 wr C2"])), 2);
    assert_eq!(code(&spinsw(&["classify", "S3 wr C2"])), 2);
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (puzzle, method) in [
        ("Z2 wr C4", "pgroup"),
        ("Z3 wr C3", "pgroup"),
        ("Z2 x Z2 wr C2", "involution"),
        ("S3 wr 1", "trivial"),
        ("Z4 wr C2", "decompose"),
        ("Z2 wr C2", "search"),
    ] {
        let path = dir.path().join(format!("{method}.txt"));
        let p = path.to_str().unwrap();
        let o = spinsw(&["construct", "--method", method, puzzle, "--out", p]);
        assert_eq!(code(&o), 0, "{puzzle} {method}");
        let written = std::fs::read(&path).unwrap();
        let v = spinsw(&["verify", puzzle, p]);
        assert_eq!(code(&v), 0, "{puzzle} {method}");
        assert!(stdout(&v).starts_with("valid"));
        // stdout form is byte-identical to the --out form
        let o = spinsw(&["construct", "--method", method, puzzle]);
        assert_eq!(o.stdout, written);
    }
}

#[test]
fn failed_construction_reports_no() {
    let o = spinsw(&["construct", "--method", "involution", "S3 wr C2"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("not surjective"));
}

#[test]
fn verify_rejects_bad_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    std::fs::write(&path, "strategy Z2 wr C2 2\n1 1\n0 1\n").unwrap();
    let p = path.to_str().unwrap();
    let (c, v) = json(&["verify", "Z2 wr C2", p, "--naive"]);
    assert_eq!(c, 3);
    assert_eq!(v["valid"], false);
    assert_eq!(v["naive_valid"], false);
    std::fs::write(&path, "strategy Z2 wr C2 2\n1 1\n").unwrap();
    assert_eq!(code(&spinsw(&["verify", "Z2 wr C2", p])), 2);
}

#[test]
fn enumerate_palindromes() {
    let (c, v) = json(&["enumerate", "S3 wr 1", "--length", "5", "--palindromic"]);
    assert_eq!(c, 0);
    assert_eq!(v["count"], 12);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("all.txt");
    let o = spinsw(&["enumerate", "Z3 wr 1", "--length", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
}

#[test]
fn certificates_and_classification() {
    let (c, v) = json(&["certify", "Z6 wr C3"]);
    assert_eq!(c, 3);
    assert_eq!(v["certificate"]["kind"], "SwitchQuotient");
    let (c, v) = json(&["decide", "Z2 wr C6"]);
    assert_eq!(c, 3);
    assert_eq!(v["certificate"]["kind"], "OrbitRestriction");
    assert_eq!(code(&spinsw(&["certify", "Z2 wr C4"])), 4);
    assert_eq!(code(&spinsw(&["classify", "Z2 wr C4"])), 0);
    assert_eq!(code(&spinsw(&["classify", "Z6 wr C3"])), 3);
}

#[test]
fn expectations_record_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.txt");
    spinsw(&["construct", "--method", "pgroup", "Z2 wr C4", "--out", path.to_str().unwrap()]);
    let (_, v) = json(&["expect", "Z2 wr C4", "--strategy", path.to_str().unwrap()]);
    assert_eq!(v["expected_moves"]["exact"], "8");
    let (_, v) = json(&["expect", "Z2 wr C2", "--adversary", "1/2,1/2", "--strategy", path.to_str().unwrap()]);
    assert!(v.get("error").is_some());
    let (_, a) = json(&["expect", "Z2 wr C3", "--trials", "2000", "--seed", "9"]);
    let (_, b) = json(&["expect", "Z2 wr C3", "--trials", "2000", "--seed", "9"]);
    assert_eq!(a["seed"], 9);
    assert_eq!(a["random_play"]["monte_carlo"], b["random_play"]["monte_carlo"]);
    assert_eq!(a["random_play"]["closed_form"]["exact"], "7");
}

#[test]
fn variants() {
    let (c, v) = json(&["min-spin-period", "Z2 wr C4", "--bound", "2"]);
    assert_eq!((c, v["min_spin_period"].clone()), (0, Value::from(1)));
    assert_eq!(code(&spinsw(&["min-spin-period", "Z2 wr C3", "--bound", "0"])), 3);
    assert_eq!(code(&spinsw(&["decide", "Z2 wr C3", "--spin-period", "9"])), 0);
    let (c, v) = json(&["decide", "Z2 wr C2", "--loop"]);
    assert_eq!(c, 0);
    assert_eq!(v["conjectural"], true);
    let (c, v) = json(&["decide", "Z2 wr C3", "--win-set", "0,0,0/1,1,1"]);
    assert!(c == 0 || c == 3);
    assert_eq!(v["budget"]["win_set"].as_array().unwrap().len(), 2);
}

#[test]
fn custom_action_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c2.action");
    std::fs::write(&path, "action C2 2\n0 1\n1 0\n").unwrap();
    let p = path.to_str().unwrap();
    let puzzle = format!("Z2 wr C2 on @{p}");
    assert_eq!(code(&spinsw(&["decide", &puzzle])), 0);
    let at = format!("Z2 wr @{p}");
    assert_eq!(code(&spinsw(&["decide", &at])), 0);
    std::fs::write(&path, "action C2 2\n0 1\n0 1\n").unwrap();
    assert_eq!(code(&spinsw(&["decide", &puzzle])), 2);
    assert!(Path::new(p).exists());
}
