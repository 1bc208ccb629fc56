use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::*;

#[test]
fn fit_recovers_a_power_law() {
    let xs = [1.0, 2.0, 4.0, 8.0, 16.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 0.75 * x.ln() - 2.0).collect();
    let fit = fit_exponent(&xs, &ys).unwrap();
    assert_abs_diff_eq!(fit.slope, 0.75, epsilon = 1e-12);
    assert_abs_diff_eq!(fit.intercept, -2.0, epsilon = 1e-12);
    assert!(fit.max_residual < 1e-12);
}

#[test]
fn fit_rejects_bad_input() {
    assert!(matches!(fit_exponent(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]), Err(Error::DegenerateData(_))));
    assert!(fit_exponent(&[1.0, 2.0, 2.0, 3.0], &[0.0; 4]).is_err());
    assert!(fit_exponent(&[0.0, 1.0, 2.0, 3.0], &[0.0; 4]).is_err());
    assert!(fit_exponent(&[1.0, 2.0, 3.0, 4.0], &[0.0, f64::NAN, 0.0, 0.0]).is_err());
    assert!(fit_exponent(&[1.0, 2.0, 3.0, 4.0], &[0.0; 3]).is_err());
}

proptest! {
    #[test]
    fn fit_is_exact_on_noiseless_data(
        slope in -5.0f64..5.0,
        c in -10.0f64..10.0,
        start in 0.1f64..10.0,
        ratio in 1.1f64..3.0,
        n in 4usize..12,
    ) {
        let xs: Vec<f64> = (0..n).map(|i| start * ratio.powi(i as i32)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| slope * x.ln() + c).collect();
        let fit = fit_exponent(&xs, &ys).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
    }
}

fn report(rule: PassRule, rows: Vec<ReportRow>, slope: Option<f64>) -> ExperimentReport {
    let mut rep = ExperimentReport::new("t", rule, "test");
    if let Some(s) = slope {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| s * x.ln()).collect();
        rep.fit = Some(fit_exponent(&xs, &ys).unwrap());
    }
    rep.rows = rows;
    rep.evaluate()
}

#[test]
fn slope_rule_uses_tolerance() {
    let r = |s| report(PassRule::Slope { predicted: 0.5, tolerance: 0.02, residual_cap: 0.05 }, vec![], Some(s));
    assert!(r(0.51).pass);
    assert!(!r(0.53).pass);
}

#[test]
fn window_and_cap_rules() {
    let rows = vec![ReportRow::single(0.0, 0.5), ReportRow::single(1.0, 3.0)];
    assert!(report(PassRule::Window { lo: 0.1, hi: 10.0 }, rows.clone(), None).pass);
    assert!(!report(PassRule::Window { lo: 1.0, hi: 10.0 }, rows.clone(), None).pass);
    assert!(report(PassRule::Cap { cap: 3.0 }, rows.clone(), None).pass);
    assert!(!report(PassRule::Cap { cap: 2.0 }, rows, None).pass);
}

#[test]
fn growth_and_no_growth_rules() {
    assert!(report(PassRule::Growth { predicted: 0.5, margin: 0.05 }, vec![], Some(0.3)).pass);
    assert!(!report(PassRule::Growth { predicted: 0.5, margin: 0.05 }, vec![], Some(0.01)).pass);
    let flat = vec![ReportRow::single(1.0, 1.0), ReportRow::single(2.0, 2.0)];
    assert!(report(PassRule::NoGrowth { factor: 10.0 }, flat, None).pass);
    let grows = vec![ReportRow::single(1.0, 1.0), ReportRow::single(2.0, 20.0)];
    assert!(!report(PassRule::NoGrowth { factor: 10.0 }, grows, None).pass);
}

#[test]
fn bounded_rule_normalizes_by_the_exponent() {
    let rows: Vec<ReportRow> = [1.0, 2.0, 4.0, 8.0].iter().map(|&t: &f64| ReportRow::new(t, 1.0, t.powf(1.5))).collect();
    assert!(report(PassRule::Bounded { exponent: 1.5, tolerance: 0.05, factor: 10.0 }, rows.clone(), Some(1.5)).pass);
    assert!(!report(PassRule::Bounded { exponent: 0.0, tolerance: 0.05, factor: 10.0 }, rows, Some(1.5)).pass);
}

#[test]
fn csv_has_hash_line_and_header() {
    let rep = report(PassRule::Cap { cap: 2.0 }, vec![ReportRow::new(1.0, 2.0, 1.0)], None);
    let csv = rep.to_csv("abc");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# config_hash=abc"));
    assert_eq!(lines.next(), Some("parameter,src_norm,tgt_norm,ratio"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn nikolskij_condition_examples() {
    use crate::params::Extended::Finite;
    assert!(nikolskij_condition(1, Finite(2.0), 0.0, Finite(1.5), -1.0 / 3.0));
    assert!(nikolskij_condition(1, Finite(2.0), 0.5, Finite(2.0), 0.5));
    assert!(!nikolskij_condition(1, Finite(2.0), 0.0, Finite(2.0), 0.5));
}

#[test]
fn config_hash_ignores_out_and_jobs() {
    let mut cfg = RunConfig::default_suite();
    let h = config_hash(&cfg);
    cfg.out = Some("elsewhere".into());
    cfg.jobs = Some(4);
    assert_eq!(config_hash(&cfg), h);
    cfg.seed = 1;
    assert_ne!(config_hash(&cfg), h);
}

#[test]
fn run_config_round_trips() {
    let cfg = RunConfig::default_suite();
    let text = serde_json::to_string(&cfg).unwrap();
    let back: RunConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn experiment_accepts_rational_strings() {
    let e: Experiment = serde_json::from_str(
        r#"{"kind":"log_dichotomy","d":1,"p0":2,"gamma0":0,"p1":"3/2","gamma1":"-1/4"}"#,
    )
    .unwrap();
    assert_eq!(e, Experiment::LogDichotomy { d: 1, p0: 2.0, gamma0: 0.0, p1: 1.5, gamma1: -0.25 });
    assert!(serde_json::from_str::<Experiment>(r#"{"kind":"nope"}"#).is_err());
}

#[test]
fn log_dichotomy_passes() {
    let rep = check_log_dichotomy(1, 2.0, 0.0, 1.5, -0.25).unwrap();
    assert!(rep.pass, "{}", rep.summary());
}
