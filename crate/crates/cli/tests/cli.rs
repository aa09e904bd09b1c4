use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const GOLDEN: &str = r#"{"decomp":{"n":2,"p_minus":1,"p_zero":0,"p_plus":0,"q_minus":0,"q_zero":0,"q_plus":0,
"thetas":[{"irrational":"0.6180339887498948482045868343656381177203091798057628621354486227052605"}],
"alphas":[],"betas":[],"k":0},"i1":1,"convex_mode":false}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_indexjump"));
    c.env_remove("INDEXJUMP_PRECISION").env_remove("INDEXJUMP_WORKERS");
    c
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn iterate_csv_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", GOLDEN);
    let out = run(&["--precision", "30", "iterate", "--data", g.to_str().unwrap(), "--m-max", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["m", "index", "nullity", "mean_index_m"]);
    let ints: Vec<[&str; 3]> = rows[1..].iter().map(|r| [r[0], r[1], r[2]]).collect();
    assert_eq!(ints, [["1", "1", "1"], ["2", "2", "1"], ["3", "3", "1"], ["4", "6", "1"]]);
    assert!(rows[4][3].starts_with("6.47213595"));
}

#[test]
fn iterate_json_has_envelope() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", GOLDEN);
    let v = json(&run(&["iterate", "--input", g.to_str().unwrap(), "--m-max", "3", "--format", "json"]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "iterate");
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 3);
    assert!(v["result"]["mean_index"]["irrational"].as_str().unwrap().starts_with("1.6180339887"));
}

#[test]
fn splitting_lists_the_unit_spectrum() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", GOLDEN);
    let v = json(&run(&["splitting", "--input", g.to_str().unwrap()]));
    let r = &v["result"];
    assert_eq!(r["s_plus_one"], 1);
    assert_eq!(r["c"], 1);
    assert_eq!(r["entries"].as_array().unwrap().len(), 3);
    let minus = json(&run(&["splitting", "--input", g.to_str().unwrap(), "--omega", "-1"]));
    assert_eq!(minus["result"]["entries"][0]["multiplicity"], 0);
}

#[test]
fn oracle_on_rotation_generators() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.json", r#"{"hamiltonian": [[1, 0], [0, 1]], "tau": 7.0}"#);
    let v = json(&run(&["oracle", "--generator", h.to_str().unwrap()]));
    assert_eq!(v["result"]["index"], 3);
    assert_eq!(v["result"]["nullity"], 0);
    let b = write(dir.path(), "b.json", r#"{"blocks": [{"kind": "rotation", "angle_over_pi": 0.5}]}"#);
    let v = json(&run(&["oracle", "--generator", b.to_str().unwrap(), "--m", "4"]));
    assert_eq!(v["result"]["index"], 1);
    assert_eq!(v["result"]["nullity"], 2);
}

#[test]
fn jump_search_is_deterministic_across_workers() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", &format!("[{GOLDEN}]"));
    let args = ["jump-search", "--paths", p.to_str().unwrap(), "--n-max", "20000"];
    let one = run(&[&args[..], &["--workers", "1"]].concat());
    let four = run(&[&args[..], &["--workers", "4"]].concat());
    assert_eq!(String::from_utf8_lossy(&one.stdout), String::from_utf8_lossy(&four.stdout));
    let v = json(&one);
    let sols = v["result"]["outcome"]["solutions"].as_array().unwrap();
    assert!(!sols.is_empty());
    let per_vertex: u64 = v["result"]["hits_per_vertex"].as_object().unwrap().values().map(|x| x.as_u64().unwrap()).sum();
    assert_eq!(per_vertex, sols.len() as u64);
}

#[test]
fn ellipsoid_pipeline_reports_counts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ell.json");
    let status = bin()
        .args(["ellipsoid", "--alphas", "1,sqrt2", "--mode", "convex", "--n-max", "2000", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let c = &v["result"]["counts"];
    assert_eq!(c["elliptic_orbits"], 2);
    assert_eq!(c["varrho"], 2);
    assert_eq!(c["irrational_claim"], true);
    assert_eq!(v["result"]["jump"]["outcome"]["solutions"][0]["N"], 816);
}

#[test]
fn resonant_ellipsoid_is_an_input_error() {
    let out = run(&["ellipsoid", "--alphas", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resonant"));
}

#[test]
fn malformed_input_reports_position() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"decomp\": {\"n\": \"two\"}}");
    let out = run(&["iterate", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1 column"));
    let broken = write(dir.path(), "broken.json", "{\n  \"decomp\": [\n");
    let out = run(&["iterate", "--input", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn quick_selftest_passes() {
    let v = json(&run(&["selftest", "--quick", "--seed", "7"]));
    for suite in v["result"].as_array().unwrap() {
        assert_eq!(suite["failures"].as_array().unwrap().len(), 0, "{suite}");
    }
}
