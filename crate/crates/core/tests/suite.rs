use std::fs;

use powemb::verify::{config_hash, run_experiment, run_suite, Experiment, RunConfig};

fn small_config() -> RunConfig {
    serde_json::from_str(
        r#"{
            "grid": {"d": 1, "L": 16, "N": 4096},
            "seed": 7,
            "experiments": [
                {"kind": "peak_scaling", "p": 2, "gamma": "1/2", "j": 0, "n": [3, 4, 5, 6]},
                {"kind": "translation_scaling", "p": 4, "gamma": 1, "lambda": [4, 8, 16, 32]},
                {"kind": "log_dichotomy", "d": 1, "p0": 2, "gamma0": 0, "p1": "3/2", "gamma1": "-1/4"},
                {"kind": "gagliardo", "s0": 0, "s1": 2, "theta": "1/2", "p": 2, "q": 2, "gamma": 0, "batch": 4,
                 "grid": {"d": 1, "L": 16, "N": 1024}}
            ]
        }"#,
    )
    .unwrap()
}

#[test]
fn suite_writes_reports_with_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config();
    let hash = config_hash(&cfg);
    let outcome = run_suite(&cfg).unwrap();
    assert!(outcome.passed(), "{:?}", outcome.reports.iter().map(|r| r.summary()).collect::<Vec<_>>());
    assert_eq!(outcome.reports.len(), 4);
    for rep in &outcome.reports {
        rep.write(dir.path(), &hash).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(format!("{}.json", rep.id))).unwrap()).unwrap();
        assert_eq!(json["config_hash"], hash.as_str());
        assert_eq!(json["pass"], true);
        let csv = fs::read_to_string(dir.path().join(format!("{}.csv", rep.id))).unwrap();
        assert!(csv.starts_with(&format!("# config_hash={hash}\n")));
        assert_eq!(csv.lines().count(), rep.rows.len() + 2);
    }
}

#[test]
fn runs_are_deterministic_and_independent_of_jobs() {
    let cfg = small_config();
    let a = run_suite(&cfg).unwrap();
    let b = run_suite(&RunConfig { jobs: Some(3), ..cfg }).unwrap();
    assert_eq!(a.reports, b.reports);
}

#[test]
fn report_ids_are_unique() {
    let outcome = run_suite(&small_config()).unwrap();
    let mut ids: Vec<_> = outcome.reports.iter().map(|r| r.id.clone()).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), outcome.reports.len());
}

#[test]
fn nikolskij_refuses_parameters_outside_the_condition() {
    let cfg = small_config();
    let e: Experiment = serde_json::from_str(
        r#"{"kind": "nikolskij", "p0": 2, "gamma0": 0, "p1": 2, "gamma1": "1/2", "alpha": [0],
            "t": [1, 2, 4, 8], "bases": 1, "grid": {"d": 1, "L": 32, "N": 2048}}"#,
    )
    .unwrap();
    assert!(run_experiment(&e, &cfg, 0).is_err());
    let forced: Experiment = serde_json::from_str(
        r#"{"kind": "nikolskij", "p0": 2, "gamma0": 0, "p1": 2, "gamma1": "1/2", "alpha": [0],
            "t": [1, 2, 4, 8], "bases": 1, "force": true, "grid": {"d": 1, "L": 32, "N": 2048}}"#,
    )
    .unwrap();
    let reps = run_experiment(&forced, &cfg, 0).unwrap();
    assert_eq!(reps[0].parameters["forced"], true);
}

#[test]
fn unknown_fields_and_kinds_are_rejected() {
    assert!(serde_json::from_str::<RunConfig>(r#"{"experiments": [{"kind": "fourier_magic"}]}"#).is_err());
    assert!(serde_json::from_str::<RunConfig>(r#"{"experiments": [], "colour": 1}"#).is_err());
}

#[test]
fn default_suite_lists_every_kind() {
    let cfg = RunConfig::default_suite();
    let kinds: std::collections::BTreeSet<_> = cfg.experiments.iter().map(|e| e.kind()).collect();
    assert_eq!(kinds.len(), 8);
}
