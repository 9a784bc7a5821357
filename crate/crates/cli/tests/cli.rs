use std::path::PathBuf;
use std::process::{Command, Output};

fn zkxfer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zkxfer")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zkxfer-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn list_names_every_experiment() {
    let out = zkxfer(&["--list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("attack2-detect"));
}

#[test]
fn attack2_five_rounds_uses_five_pairs() {
    let v = json(&zkxfer(&["--experiment", "attack2", "--rounds", "5", "--trials", "20"]));
    assert_eq!(v["resources"]["bell_pairs"], 5);
    assert_eq!(v["resources"]["qubits"], 5);
    assert_eq!(v["metrics"][0]["name"], "eve_acceptance");
    assert_eq!(v["metrics"][0]["empirical_rate"], 1.0);
}

#[test]
fn gmw_cheat_rate_near_model() {
    let v = json(&zkxfer(&["--experiment", "gmw", "--rounds", "8", "--trials", "100000", "--seed", "5"]));
    let cheat = v["metrics"].as_array().unwrap().iter().find(|m| m["name"] == "cheat_acceptance").unwrap();
    assert_eq!(cheat["model_value"], 0.00390625);
    assert!(cheat["std_devs_off"].as_f64().unwrap().abs() <= 4.0);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["--experiment", "splitshare-snoop", "--m", "8", "--k", "2", "--trials", "1", "--seed", "77", "--format", "csv"];
    let a = zkxfer(&args);
    let b = zkxfer(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_and_transcript_files() {
    let report = tmp("report.json");
    let transcript = tmp("transcript.jsonl");
    let out = zkxfer(&[
        "--experiment",
        "attack1",
        "--rounds",
        "3",
        "--trials",
        "4",
        "--out",
        report.to_str().unwrap(),
        "--transcript",
        transcript.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["resources"]["bell_pairs"], 24);
    let lines = std::fs::read_to_string(&transcript).unwrap();
    assert_eq!(lines.lines().count(), 3);
    for line in lines.lines() {
        let row: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(row["H"]["upper"].is_string());
    }
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["--experiment", "nope"],
        vec!["--experiment", "splitshare", "--m", "10", "--k", "3"],
        vec!["--experiment", "gmw", "--trials", "0"],
        vec!["--experiment", "attack1", "--digest-mode", "bijective", "--digest-width", "8"],
        vec!["--experiment", "gmw", "--format", "xml"],
        vec!["--experiment", "attack1", "--digest-width", "0"],
    ] {
        let out = zkxfer(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_3() {
    let out = zkxfer(&["--experiment", "gmw", "--trials", "1", "--out", "/nonexistent-dir/x/report.json"]);
    assert_eq!(out.status.code(), Some(3));
}
