//! End-to-end checks of the command-line surface: exit codes, file
//! formats, and rerun determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_surjunct"))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).unwrap()
}

const IDENTITY_CA: &str = r#"{"group": {"type":"Z"}, "alphabet": 2, "memory": [0], "rule": [0,1]}"#;
const SHIFT_CA: &str = r#"{"group": {"type":"Z"}, "alphabet": 2, "memory": [1], "rule": [0,1]}"#;
const XOR_CA: &str =
    r#"{"group": {"type":"Z"}, "alphabet": 2, "memory": [0,1], "rule": [0,1,1,0]}"#;
const CONST_ZERO_CA: &str =
    r#"{"group": {"type":"Z"}, "alphabet": 2, "memory": [0], "rule": [0,0]}"#;

#[test]
fn analyze_identity_all_true() {
    let dir = tempfile::tempdir().unwrap();
    let ca = write(dir.path(), "id.json", IDENTITY_CA);
    let out = bin().args(["analyze", "--ca"]).arg(&ca).output().unwrap();
    let report = stdout_json(&out);
    let result = &report["result"];
    for flag in [
        "injective",
        "surjective",
        "pre_injective",
        "post_surjective",
        "reversible",
    ] {
        assert_eq!(result[flag], "true", "flag {flag}");
    }
    assert_eq!(report["command"], "analyze");
    assert!(report["inputs"]["ca"]["sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn analyze_xor_flags() {
    let dir = tempfile::tempdir().unwrap();
    let ca = write(dir.path(), "xor.json", XOR_CA);
    let out = bin().args(["analyze", "--ca"]).arg(&ca).output().unwrap();
    let result = stdout_json(&out)["result"].clone();
    assert_eq!(result["injective"], "false");
    assert_eq!(result["surjective"], "true");
    assert_eq!(result["pre_injective"], "true");
    assert_eq!(result["post_surjective"], "false");
}

#[test]
fn analyze_malformed_rule_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let ca = write(
        dir.path(),
        "bad.json",
        r#"{"group": {"type":"Z"}, "alphabet": 2, "memory": [0,1], "rule": [0,1,1]}"#,
    );
    let out = bin().args(["analyze", "--ca"]).arg(&ca).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("table has length"), "stderr: {stderr}");
}

#[test]
fn analyze_budget_exhaustion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let ca = write(dir.path(), "xor.json", XOR_CA);
    let out = bin()
        .args(["analyze", "--budget-window", "4", "--ca"])
        .arg(&ca)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn census_z_16_rules() {
    let out = bin()
        .args([
            "census",
            "--k",
            "2",
            "--memory",
            "0,1",
            "--group",
            r#"{"type":"Z"}"#,
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 17); // header + 16 rules
    assert_eq!(
        lines[0],
        "rule_id,injective,surjective,pre_injective,post_surjective,N_radius,M_radius,method"
    );
    let reversible = lines[1..]
        .iter()
        .filter(|l| l.split(',').nth(1) == Some("true"))
        .count();
    assert_eq!(reversible, 4);
}

#[test]
fn census_c3_coherent() {
    let out = bin()
        .args([
            "census",
            "--k",
            "2",
            "--memory",
            "0,1,2",
            "--group",
            r#"{"type":"builder","name":"cyclic","args":[3]}"#,
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 257); // header + 256 rules
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        // post_surjective iff injective throughout
        assert_eq!(fields[1], fields[4], "row {line}");
        assert_eq!(fields[7], "brute");
    }
}

#[test]
fn invert_shift_has_memory_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let ca = write(dir.path(), "shift.json", SHIFT_CA);
    let out = bin().args(["invert", "--ca"]).arg(&ca).output().unwrap();
    let report = stdout_json(&out);
    assert_eq!(
        report["result"]["automaton"]["memory"],
        serde_json::json!([-1])
    );
    assert_eq!(report["result"]["injectivity_set"], serde_json::json!([-1]));
}

#[test]
fn invert_rejects_non_injective() {
    let dir = tempfile::tempdir().unwrap();
    let ca = write(dir.path(), "xor.json", XOR_CA);
    let out = bin().args(["invert", "--ca"]).arg(&ca).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn image_sft_identity_unconstrained() {
    let dir = tempfile::tempdir().unwrap();
    let ca = write(dir.path(), "id.json", IDENTITY_CA);
    let out = bin().args(["image-sft", "--ca"]).arg(&ca).output().unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["result"]["sft"]["forbidden"], serde_json::json!([]));
}

#[test]
fn goe_constant_zero() {
    let dir = tempfile::tempdir().unwrap();
    let ca = write(dir.path(), "cz.json", CONST_ZERO_CA);
    let out = bin()
        .args(["goe", "--window", "0", "--ca"])
        .arg(&ca)
        .output()
        .unwrap();
    let report = stdout_json(&out);
    let patterns = report["result"]["goe_patterns"].as_array().unwrap();
    assert_eq!(patterns.len(), 1);
    assert_eq!(patterns[0]["values"], serde_json::json!([1]));
}

#[test]
fn ring_scan_s3_no_violations() {
    let out = bin()
        .args([
            "ring",
            "scan",
            "--p",
            "2",
            "--group",
            r#"{"type":"builder","name":"symmetric","args":[3]}"#,
        ])
        .output()
        .unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["result"]["pairs_checked"], 4096);
    assert_eq!(report["result"]["violation_count"], 0);
}

#[test]
fn ring_claims_on_klein_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let klein = r#"{"type":"builder","name":"product","args":[{"type":"builder","name":"cyclic","args":[2]},{"type":"builder","name":"cyclic","args":[2]}]}"#;
    let element = format!(r#"{{"p":2,"group":{klein},"terms":[[1,1],[2,1],[3,1]]}}"#);
    let a = write(dir.path(), "a.json", &element);
    let b = write(dir.path(), "b.json", &element);
    let out = bin()
        .args(["ring", "claims", "--a"])
        .arg(&a)
        .arg("--b")
        .arg(&b)
        .output()
        .unwrap();
    let report = stdout_json(&out);
    assert!(report["result"]["injectivity_certificate"]["set"].is_array());
    assert!(report["result"]["post_surjectivity_certificate"]["set"].is_array());
}

#[test]
fn ring_norm_of_difference() {
    let dir = tempfile::tempdir().unwrap();
    // e3 - e0 in F_2[S_3]: norm equals the Hamming norm of e3 (a 3-cycle)
    let f = write(
        dir.path(),
        "f.json",
        r#"{"p":2,"group":{"type":"builder","name":"symmetric","args":[3]},"terms":[[0,1],[3,1]]}"#,
    );
    let out = bin()
        .args(["ring", "norm", "--f"])
        .arg(&f)
        .output()
        .unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["result"]["norm_s"], "1");
    assert_eq!(report["result"]["degree"], 3);
}

#[test]
fn probe_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("probe1.csv");
    let out2 = dir.path().join("probe2.csv");
    for out in [&out1, &out2] {
        let status = bin()
            .args([
                "ring",
                "probe",
                "--n",
                "3",
                "--len-bound",
                "2",
                "--samples",
                "25",
                "--seed",
                "7",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let bytes1 = std::fs::read(&out1).unwrap();
    let bytes2 = std::fs::read(&out2).unwrap();
    assert!(!bytes1.is_empty());
    assert_eq!(bytes1, bytes2);
}

#[test]
fn analyze_output_roundtrips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let ca = write(dir.path(), "shift.json", SHIFT_CA);
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["analyze", "--ca"])
            .arg(&ca)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2);
    // parses back through the schema
    let report: serde_json::Value = serde_json::from_slice(&b1).unwrap();
    assert_eq!(
        report["result"]["post_surjectivity_certificate"]["set"],
        serde_json::json!([1])
    );
}
