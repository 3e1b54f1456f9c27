use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn sgl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn validate_classifies() {
    let v = json(&sgl(&["validate", &path("rps.json")]));
    assert_eq!(v["valid"], true);
    assert_eq!(v["classification"]["zero_sum"], true);
    assert_eq!(v["ergodic"], true);
}

#[test]
fn minimax_on_rps() {
    let v = json(&sgl(&["solve", "minimax", &path("rps.json")]));
    assert!(v["value"].as_f64().unwrap().abs() < 1e-9);
    for p in v["row"].as_array().unwrap() {
        assert!((p.as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }
}

#[test]
fn support_enumeration_on_bos() {
    let v = json(&sgl(&["solve", "support-enum", &path("bos.json")]));
    assert_eq!(v["count"], 3);
}

#[test]
fn restricted_solve_writes_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eq.json");
    let v = json(&sgl(&[
        "solve",
        "restricted",
        &path("rps.json"),
        "--space",
        &path("full.json"),
        "--space",
        &path("rps_column_hull.json"),
        "--out",
        out.to_str().unwrap(),
    ]));
    assert!((v["value"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-9);
    assert_eq!(v["certificate"]["verdict"], true);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(written, v);
}

#[test]
fn check_pure_profile() {
    let v = json(&sgl(&[
        "check",
        "--game",
        &path("rps.json"),
        "--policy",
        &path("pure_rock_rock.json"),
        "--eps",
        "0.5",
    ]));
    assert_eq!(v["verdict"], false);
    assert!((v["max_gap"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let v = json(&sgl(&[
        "sweep",
        "--game",
        &path("fact5.json"),
        "--spaces",
        &path("state_uniform.json"),
        &path("state_uniform.json"),
        "--resolution",
        "0.05",
        "--out",
        csv.to_str().unwrap(),
    ]));
    assert_eq!(v["points"], 441);
    assert!(v["min_max_gap"].as_f64().unwrap() > 0.0);
    let rows = std::fs::read_to_string(csv).unwrap().lines().count();
    assert_eq!(rows, 442);
}

#[test]
fn learn_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let out = sgl(&[
            "learn",
            "--game",
            &path("rps.json"),
            "--algo",
            "wolf-phc",
            "--iters",
            "5000",
            "--seed",
            "3",
            "--out",
            csv.to_str().unwrap(),
        ]);
        (json(&out), std::fs::read_to_string(csv).unwrap())
    };
    let (a, csv_a) = run("a.csv");
    let (b, csv_b) = run("b.csv");
    assert_eq!(a, b);
    assert_eq!(csv_a, csv_b);
    assert!(csv_a.starts_with("iteration,player,state,"));
}

#[test]
fn q_learning_runs() {
    let v = json(&sgl(&["learn", "--game", &path("bos.json"), "--algo", "q", "--iters", "2000"]));
    assert_eq!(v["players"].as_array().unwrap().len(), 2);
}

#[test]
fn reproduce_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&sgl(&["reproduce", "fact1", "--out", dir.path().to_str().unwrap()]));
    assert_eq!(v["profiles"], 9);
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"players\": 2}").unwrap();
    assert_eq!(sgl(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(sgl(&["validate", "/nonexistent/game.json"]).status.code(), Some(2));
    assert_eq!(sgl(&["reproduce", "nonsense"]).status.code(), Some(2));
}

#[test]
fn unsupported_exits_3() {
    assert_eq!(sgl(&["solve", "minimax", &path("bos.json")]).status.code(), Some(3));
    assert_eq!(sgl(&["solve", "minimax", &path("fact5.json")]).status.code(), Some(3));
}

#[test]
fn non_ergodic_exits_4() {
    let out = sgl(&[
        "check",
        "--game",
        &path("absorbing.json"),
        "--policy",
        &path("absorbing_policy.json"),
    ]);
    assert_eq!(out.status.code(), Some(4));
}
