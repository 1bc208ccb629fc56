use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const B_SRC: &str = r#"{"family":"B","s":1,"p":2,"q":1,"gamma":0,"dim":1}"#;
const B_TGT: &str = r#"{"family":"B","s":0,"p":4,"q":1,"gamma":0,"dim":1}"#;

fn powemb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powemb")).args(args).env_remove("POWEMB_OUT").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn decide_exit_codes_follow_the_verdict() {
    let out = powemb(&["decide", B_SRC, B_TGT]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["outcome"], "embeds");

    let out = powemb(&["decide", B_TGT, B_SRC]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["outcome"], "no");

    // F into F with p1 < p0 on the sharp line and q0 < 2 is open
    let f0 = r#"{"family":"F","s":"3/4","p":4,"q":1,"gamma":2,"dim":1}"#;
    let f1 = r#"{"family":"F","s":"3/5","p":2,"q":2,"gamma":"1/5","dim":1}"#;
    let out = powemb(&["decide", f0, f1]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(stdout_json(&out)["outcome"], "unknown");
}

#[test]
fn identical_spaces_use_the_trivial_rule() {
    let out = powemb(&["decide", B_SRC, B_SRC]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["trace"][0]["rule"], "TRIVIAL_13");
}

#[test]
fn bad_input_exits_64() {
    assert_eq!(code(&powemb(&["decide", "{not json", B_TGT])), 64);
    let bad_gamma = r#"{"family":"B","s":1,"p":2,"q":1,"gamma":-2,"dim":1}"#;
    assert_eq!(code(&powemb(&["decide", bad_gamma, B_TGT])), 64);
    assert_eq!(code(&powemb(&["witness", "bogus"])), 64);
    assert_eq!(code(&powemb(&["--grid", "1,16", "verify", "--list"])), 64);
}

#[test]
fn lattice_of_nested_spaces_is_triangular() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("specs.json");
    let c = r#"{"family":"B","s":-1,"p":8,"q":1,"gamma":0,"dim":1}"#;
    fs::write(&file, format!("[{B_SRC},{B_TGT},{c}]")).unwrap();
    let out = powemb(&["lattice", file.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert!(report["config_hash"].is_string());

    let text = powemb(&["lattice", file.to_str().unwrap()]);
    let table = String::from_utf8(text.stdout).unwrap();
    assert!(table.contains("transitivity audit: 0 violation(s)"), "{table}");
}

#[test]
fn lattice_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, "[]").unwrap();
    assert_eq!(code(&powemb(&["lattice", empty.to_str().unwrap()])), 0);

    let mixed = dir.path().join("mixed.json");
    let d2 = r#"{"family":"B","s":0,"p":4,"q":1,"gamma":0,"dim":2}"#;
    fs::write(&mixed, format!("[{B_SRC},{d2}]")).unwrap();
    assert_eq!(code(&powemb(&["lattice", mixed.to_str().unwrap()])), 64);
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn witness_peaks_writes_five_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = powemb(&[
        "witness", "peaks", "--p", "2", "--gamma", "0.5", "--j", "0", "--n", "3..7", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&dir.path().join("peaks"));
    assert_eq!(m["members"].as_array().unwrap().len(), 5);
    assert!(dir.path().join("peaks/peaks_004.bin").exists());
}

#[test]
fn env_var_overrides_out_flag() {
    let flag = tempfile::tempdir().unwrap();
    let env = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_powemb"))
        .args(["witness", "logsing", "--p0", "2", "--p1", "1.5", "--gamma0", "0", "--eps", "1e-4"])
        .args(["--out", flag.path().to_str().unwrap()])
        .env("POWEMB_OUT", env.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = env.path().join("logsing/logsing_000.csv");
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("# config_hash="));
    assert!(!flag.path().join("logsing").exists());
}

#[test]
fn verify_list_prints_the_catalog() {
    let out = powemb(&["verify", "--list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in ["peak_scaling", "nikolskij", "coherence"] {
        assert!(text.contains(kind));
    }
}

fn write_config(dir: &Path, experiments: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, format!(r#"{{"grid": {{"d": 1, "L": 16, "N": 4096}}, "seed": 3, "experiments": [{experiments}]}}"#))
        .unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn verify_is_byte_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"kind": "peak_scaling", "p": 2, "gamma": "1/2", "j": 0, "n": [3, 4, 5, 6]},
           {"kind": "translation_scaling", "p": 4, "gamma": 1, "lambda": [4, 8, 16, 32]}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&powemb(&["verify", &cfg, "--out", a.to_str().unwrap()])), 0);
    assert_eq!(code(&powemb(&["verify", &cfg, "--out", b.to_str().unwrap(), "--jobs", "2"])), 0);
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
    let summary: Value = serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    let report: Value = serde_json::from_str(&fs::read_to_string(a.join("000_peak_scaling.json")).unwrap()).unwrap();
    assert_eq!(summary["config_hash"], report["config_hash"]);
}

#[test]
fn verify_reports_errors_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"kind": "peak_scaling", "p": 2, "gamma": 0, "j": 0, "n": [3, 40]}"#);
    let out = powemb(&["verify", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8(out.stdout).unwrap().contains("ERROR 000_peak_scaling"));
}

#[test]
fn verify_rejects_malformed_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"kind": "nope"}"#);
    assert_eq!(code(&powemb(&["verify", &cfg])), 64);
}
