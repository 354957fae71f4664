use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pbl-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn pbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbl")).args(args).env_remove("PBL_CAPS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn pprt_of_xor_is_four() {
    let out = pbl(&["pprt", "--input", &data("xor1.json"), "--eps", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("V (exact)") && l.ends_with(" 4")), "{text}");
    assert!(text.contains("[2,2]"));
}

#[test]
fn large_grid_needs_allow_large() {
    let out = pbl(&["pprt", "--input", &data("eq4x4.json"), "--eps", "1/8"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--allow-large"));
}

#[test]
fn decimal_eps_is_malformed() {
    let out = pbl(&["prt", "--input", &data("xor1.json"), "--eps", "0.125"]);
    assert_eq!(out.status.code(), Some(4));
    let out = pbl(&["prt", "--input", "/nonexistent/relation.json", "--eps", "0"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn infeasible_relation_exits_two() {
    let path = scratch("empty.json");
    std::fs::write(&path, r#"{"kind":"cc","x_size":1,"y_size":2,"outputs":["0"],"accept":[[[0],[]]]}"#).unwrap();
    let out = pbl(&["pprt", "--input", path.to_str().unwrap(), "--eps", "1/8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("infeasible"));
}

#[test]
fn certificates_round_trip_and_tampering_is_caught() {
    let cert = scratch("xor-cert.json");
    let c = cert.to_str().unwrap();
    let out = pbl(&["pprt", "--input", &data("xor1.json"), "--eps", "1/8", "--cert-out", c]);
    assert_eq!(out.status.code(), Some(0));
    let ok = pbl(&["check-cert", "--input", &data("xor1.json"), "--eps", "1/8", "--cert", c]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("accepted"));

    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let v = doc["v"]["1:0:0"].as_str().unwrap().parse::<pbl_core::Rational>().unwrap();
    doc["v"]["1:0:0"] = serde_json::json!((v + pbl_core::Rational::one()).to_string());
    let bad = scratch("xor-bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let out = pbl(&["check-cert", "--input", &data("xor1.json"), "--eps", "1/8", "--cert", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
    assert!(stdout(&out).contains("block 1:0:0"), "{}", stdout(&out));
}

#[test]
fn json_reports_are_byte_identical() {
    let args = ["synth", "--family", "eq:3", "--eps", "1/4", "--format", "json"];
    let a = pbl(&args);
    let b = pbl(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["format_version"], 1);
    assert_eq!(doc["checks"]["error_within_twice_eps"], true);
}

#[test]
fn synthesized_protocols_reload_and_verify() {
    for (family, eps) in [("gt:3", "1/8"), ("maj:3", "1/4")] {
        let path = scratch(&format!("{}.json", family.replace(':', "-")));
        let p = path.to_str().unwrap();
        let out = pbl(&["synth", "--family", family, "--eps", eps, "--protocol-out", p, "--seed", "1"]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(stdout(&out).contains("sampled run (seed 1)"));
        let out = pbl(&["verify", "--family", family, "--protocol", p]);
        assert_eq!(out.status.code(), Some(0));
        let out = pbl(&["verify", "--family", family, "--protocol", p, "--eps", "0"]);
        assert_eq!(out.status.code(), Some(5));
    }
}

#[test]
fn oracle_witness_is_a_verifiable_protocol() {
    let path = scratch("and-witness.json");
    let p = path.to_str().unwrap();
    let out = pbl(&["oracle", "--input", &data("and1.json"), "--eps", "0", "--protocol-out", p, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["value"], 2);
    assert_eq!(doc["crosscheck"]["exhaustive"], "3");
    let out = pbl(&["verify", "--input", &data("and1.json"), "--protocol", p, "--eps", "0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn caps_can_be_lowered_but_not_raised() {
    let out = pbl(&["pprt", "--family", "eq:3", "--eps", "1/8", "--cap", "cc_cells=4"]);
    assert_eq!(out.status.code(), Some(3));
    let out = pbl(&["pprt", "--family", "xor1", "--eps", "0", "--cap", "cc_cells=16"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_pbl"))
        .args(["pprt", "--family", "eq:3", "--eps", "1/8"])
        .env("PBL_CAPS", "labeled=10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn suite_runs_selected_criteria() {
    let out = pbl(&["suite", "--only", "1", "--only", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("criterion 1: PASS"));
    assert!(text.contains("criterion 6: PASS"));
    assert_eq!(pbl(&["suite", "--only", "9"]).status.code(), Some(4));
}
