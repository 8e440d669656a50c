mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::tree_bytes;
use maf_core::dataset::Report;

fn maf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maf")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(out: &Path, extra: &[&str]) {
    let mut args = vec!["simulate", "--out", s(out)];
    args.extend_from_slice(extra);
    for (flag, default) in [("--queries", "10"), ("--seed", "4")] {
        if !extra.contains(&flag) {
            args.extend([flag, default]);
        }
    }
    let o = maf(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn identify_prints_ground_truth_id() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), &["--preset", "ambiguous"]);
    let manifest = maf_core::dataset::DatasetManifest::load(dir.path().join("manifest.json")).unwrap();
    for entry in &manifest.sequences {
        let q = dir.path().join(&entry.query);
        let o = maf(&["identify", s(&q)]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), entry.ground_truth_id().unwrap());
    }
    let q = dir.path().join(&manifest.sequences[0].query);
    let o = maf(&["--json", "identify", "--explain", s(&q)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["candidate_id"], manifest.sequences[0].ground_truth_id().unwrap());
    assert!(v["trace"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn missing_flow_is_an_input_error_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), &[]);
    let q = dir.path().join("queries/syn_00000");
    std::fs::remove_file(q.join("ego/flow_0002.flo")).unwrap();
    let o = maf(&["identify", s(&q)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("flow_0002.flo"));
    let o = maf(&["identify", s(&dir.path().join("nowhere"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), &[]);
    let q = dir.path().join("queries/syn_00001");
    for args in [
        vec!["identify", s(&q), "--window-length", "0"],
        vec!["identify", s(&q), "--window-length", "4", "--window-stride", "5"],
        vec!["identify", s(&q), "--norm", "cubic"],
        vec!["identify", s(&q), "--lambda=0"],
        vec!["--jobs", "0", "identify", s(&q)],
    ] {
        assert_eq!(maf(&args).status.code(), Some(3), "{args:?}");
    }
    let manifest = dir.path().join("manifest.json");
    let o = maf(&["split", "--manifest", s(&manifest), "--split", "bogus"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unseen"));
    let o = maf(&["evaluate", "--manifest", s(&manifest), "--split", "cross_dataset", "--out", s(&dir.path().join("r.json"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn lone_candidate_query() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), &["--candidates", "1", "--queries", "2"]);
    let o = maf(&["identify", s(&dir.path().join("queries/syn_00000"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "cand_0");
}

#[test]
fn evaluate_output_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), &[]);
    let report = dir.path().join("report.json");
    let o = maf(&["--json", "evaluate", "--manifest", s(&dir.path().join("manifest.json")), "--split", "all", "--out", s(&report)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = Report::load(&report).unwrap();
    assert_eq!(v["accuracy"].as_f64().unwrap(), r.accuracy);
    assert_eq!(v["queries"].as_u64().unwrap() as usize, r.queries);
    assert_eq!(r.accuracy, 1.0);
    let o = maf(&["evaluate", "--manifest", s(&dir.path().join("manifest.json")), "--split", "all", "--out", s(&report)]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "top-1 accuracy 1 (10 queries, 0 failures)");
}

#[test]
fn split_writes_assignment() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), &[]);
    let out = dir.path().join("split.json");
    let o = maf(&["split", "--manifest", s(&dir.path().join("manifest.json")), "--split", "seen", "--out", s(&out)]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "train 8 / test 2");
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["test"], serde_json::json!(["syn_00004", "syn_00009"]));
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    simulate(&a, &["--preset", "ambiguous", "--motion-noise", "0.1"]);
    simulate(&b, &["--preset", "ambiguous", "--motion-noise", "0.1", "--jobs", "8"]);
    simulate(&c, &["--preset", "ambiguous", "--motion-noise", "0.1", "--seed", "5"]);
    assert_eq!(tree_bytes(&a), tree_bytes(&b));
    assert_ne!(tree_bytes(&a), tree_bytes(&c));
}

#[test]
fn print_config_does_nothing_else() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = maf(&["--print-config", "simulate", "--out", s(&out), "--queries", "3"]);
    assert!(o.status.success());
    assert!(!out.exists());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["simulate"]["queries"], 3);
    assert_eq!(v["simulate"]["window"]["length"], 8);
}
