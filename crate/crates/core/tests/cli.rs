use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablepieces")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn pieces_a1_lists_three() {
    let out = run(&["pieces", "--type", "A1", "--auto", "id", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let ids: Vec<&str> = v["pieces"].as_array().unwrap().iter().map(|p| p["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["J={};w=e", "J={};w=s1", "J={1};w=e"]);
    assert_eq!(v["count"], 3);
    assert_eq!(v["pieces"][2]["core"], serde_json::json!([1]));
}

#[test]
fn verify_twisted_a2_passes() {
    let out = run(&["verify", "--type", "A2", "--auto", "1:2,2:1", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["automorphism"], "1:2,2:1");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn nilcone_table_excludes_identity_pieces() {
    let out = run(&["nilcone", "--type", "A2", "--auto", "id", "--lambda", "1,2", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows.contains(&"J={};w=s1"));
    assert!(rows.iter().all(|r| !r.ends_with("w=e")));
    assert_eq!(rows.len(), 13 - 4);
}

#[test]
fn every_printed_id_round_trips_through_closure() {
    for (t, a) in [("A2", "id"), ("A2", "1:2,2:1"), ("B2", "id")] {
        let listing = json(&run(&["pieces", "--type", t, "--auto", a]));
        for p in listing["pieces"].as_array().unwrap() {
            let id = p["id"].as_str().unwrap();
            let out = run(&["closure", "--type", t, "--auto", a, "--piece", id]);
            assert_eq!(out.status.code(), Some(0), "{id}");
            let v = json(&out);
            assert_eq!(v["piece"], id);
            assert!(v["pieces"].as_array().unwrap().iter().any(|q| q == id));
        }
    }
}

#[test]
fn closure_of_open_a1_piece_is_everything() {
    let v = json(&run(&["closure", "--type", "A1", "--piece", "J={1};w=e"]));
    assert_eq!(v["count"], 3);
    let v = json(&run(&["closure", "--type", "A1", "--piece", "J={};w=s1"]));
    assert_eq!(v["pieces"], serde_json::json!(["J={};w=s1"]));
}

#[test]
fn poset_dot_is_deterministic() {
    let a = run(&["poset", "--type", "A2", "--format", "dot"]);
    let b = run(&["poset", "--type", "A2", "--format", "dot"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("digraph \"closure_poset_A2_id\" {\n"));
    assert_eq!(text.lines().filter(|l| l.ends_with("\";") && !l.contains("->")).count(), 13);
}

#[test]
fn strata_requires_identity() {
    let out = run(&["strata", "--type", "A2", "--auto", "1:2,2:1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["strata", "--type", "A1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&out),
        serde_json::json!({"strata":[{"J":[],"cone_count":2,"piece":"J={};w=e"},{"J":[1],"cone_count":1,"piece":"J={1};w=e"}]})
    );
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        &["pieces", "--type", "Q3"][..],
        &["pieces", "--type", "A2", "--auto", "1:3"],
        &["pieces", "--type", "B3", "--auto", "1:3,3:1"],
        &["nilcone", "--type", "A2", "--auto", "1:2,2:1", "--lambda", "1,2"],
        &["nilcone", "--type", "A2", "--lambda", "-1,2"],
        &["nilcone", "--type", "A2", "--lambda", "1,2,3"],
        &["closure", "--type", "A2", "--piece", "J={1};w=s1"],
        &["verify", "--type", "A2", "--suite", "everything"],
        &["pieces"],
        &["pieces", "--type", "A2", "--format", "dot"],
        &["frobnicate"],
        &["pieces", "--type", "E8"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn guard_env_is_respected() {
    let out = Command::new(env!("CARGO_BIN_EXE_stablepieces"))
        .args(["pieces", "--type", "A3"])
        .env("STABLEPIECES_GROUP_GUARD", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["pieces", "--type", "A3", "--guard", "24"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verify"));
}

#[test]
fn oracle_report_shape_and_determinism() {
    let a = run(&["oracle-pgl2", "--samples", "50", "--seed", "7"]);
    let b = run(&["oracle-pgl2", "--samples", "50", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["samples"], 50);
    assert_eq!(v["seed"], 7);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["counterexample"].is_null()));
}

#[test]
fn semistable_and_common_nilcone() {
    let v = json(&run(&["semistable", "--type", "A2"]));
    assert_eq!(v["pieces"], serde_json::json!(["J={1,2};w=e", "J={1};w=e", "J={2};w=e", "J={};w=e"]));
    let v = json(&run(&["common-nilcone", "--type", "A2"]));
    assert_eq!(
        v["pieces"],
        serde_json::json!(["J={1};w=s1.s2", "J={2};w=s2.s1", "J={};w=s1.s2", "J={};w=s1.s2.s1", "J={};w=s2.s1"])
    );
    let v = json(&run(&["common-nilcone", "--type", "A2", "--auto", "1:2,2:1"]));
    assert!(v["orbitwise"].as_array().unwrap().iter().any(|q| q == "J={};w=s1"));
}

#[test]
fn locus_report_schema() {
    let out = run(&["locus", "--type", "A2", "--lambda", "1,1", "--lambda", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["type", "automorphism", "semistable", "nilcone", "common_nilcone", "checks"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["nilcone"].get("1,0").is_some());
}
