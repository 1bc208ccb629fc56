use super::*;
use crate::params::{ext, rat};
use crate::Spec;

fn sp(text: &str) -> Spec {
    Spec::parse(text).unwrap()
}

fn b(s: &str, p: &str, q: &str, g: &str) -> Spec {
    sp(&format!(r#"{{"family":"B","s":"{s}","p":"{p}","q":"{q}","gamma":"{g}","dim":1}}"#))
}

fn f(s: &str, p: &str, q: &str, g: &str) -> Spec {
    sp(&format!(r#"{{"family":"F","s":"{s}","p":"{p}","q":"{q}","gamma":"{g}","dim":1}}"#))
}

fn h(s: &str, p: &str, g: &str) -> Spec {
    sp(&format!(r#"{{"family":"H","s":"{s}","p":"{p}","gamma":"{g}","dim":1}}"#))
}

fn w(s: &str, p: &str, g: &str) -> Spec {
    sp(&format!(r#"{{"family":"W","s":"{s}","p":"{p}","gamma":"{g}","dim":1}}"#))
}

fn outcome(v: &Verdict) -> (Outcome, Option<RuleId>) {
    (v.outcome, v.deciding_rule())
}

#[test]
fn besov_subcritical() {
    let v = decide_besov(&b("1", "2", "1", "0"), &b("0", "4", "1", "0")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::Subcritical14)));
    assert!(v.trace[0].note.contains("1/4 < (d+gamma0)/p0 = 1/2"), "{}", v.trace[0].note);
}

#[test]
fn besov_identity() {
    let a = b("1/3", "5/2", "3", "-1/2");
    let v = decide_besov(&a, &a).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::Trivial13)));
}

#[test]
fn negative_equal_weights_excluded() {
    for (s0, s1, q0, q1) in [("1", "0", "1", "1"), ("5", "-3", "inf", "1"), ("0", "0", "2", "2")] {
        let v = decide_besov(&b(s0, "2", q0, "-1/2"), &b(s1, "4", q1, "-1/2")).unwrap();
        assert_eq!(v.outcome, Outcome::DoesNotEmbed);
    }
    let v = decide_besov(&b("5", "2", "1", "-1/2"), &b("-3", "4", "1", "-1/2")).unwrap();
    assert_eq!(v.violation, Some(Violation::WeightIndex));
}

#[test]
fn besov_sharp_line_q_flip() {
    let v = decide_besov(&b("1", "2", "1", "0"), &b("3/4", "4", "2", "0")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::Sharp15)));
    let v = decide_besov(&b("1", "2", "2", "0"), &b("3/4", "4", "1", "0")).unwrap();
    assert_eq!(outcome(&v), (Outcome::DoesNotEmbed, Some(RuleId::QNecessity)));
}

#[test]
fn besov_strict_dimension_for_p1_below_p0() {
    // (d+g1)/p1 = (d+g0)/p0 = 1/2 with p1 = 3/2 < p0 = 2
    let v = decide_besov(&b("1", "2", "1", "0"), &b("0", "3/2", "inf", "-1/4")).unwrap();
    assert_eq!(outcome(&v), (Outcome::DoesNotEmbed, Some(RuleId::NecStrict45)));
}

#[test]
fn besov_infinite_p_ignores_weight() {
    let v = decide_besov(&b("1", "inf", "2", "3"), &b("1", "inf", "2", "0")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::Trivial13)));
}

#[test]
fn triebel_examples() {
    let v = decide_triebel(&f("1", "2", "2", "0"), &f("1/2", "4", "1", "0")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::FSufficient17)));

    let v = decide_triebel(&f("3/4", "4", "2", "2"), &f("3/5", "2", "2", "1/5")).unwrap();
    assert_eq!(outcome(&v), (Outcome::DoesNotEmbed, Some(RuleId::FSharpNec55)));

    let a = f("1", "3", "inf", "1");
    assert_eq!(outcome(&decide_triebel(&a, &a).unwrap()), (Outcome::Embeds, Some(RuleId::Trivial13)));

    let v = decide_triebel(&f("1", "4", "inf", "2"), &f("3/5", "2", "1", "1/5")).unwrap();
    assert_eq!(v.outcome, Outcome::Embeds);
    assert!(v.cites(RuleId::SandwichBf));
}

#[test]
fn triebel_open_regime() {
    let v = decide_triebel(&f("3/4", "4", "1", "2"), &f("3/5", "2", "2", "1/5")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Unknown, Some(RuleId::OpenRegime)));
}

#[test]
fn bessel_examples() {
    let v = decide_bessel(&h("1", "2", "1/2"), &h("4/5", "3", "3/4")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::HChar110)));

    let v = decide_bessel(&h("3/4", "4", "2"), &h("3/5", "2", "1/5")).unwrap();
    assert_eq!(outcome(&v), (Outcome::DoesNotEmbed, Some(RuleId::PqSwap114)));
    assert_eq!(v.violation, Some(Violation::SharpLine));

    let a = h("-2", "7/3", "1");
    assert!(decide_bessel(&a, &a).unwrap().is_embeds());
}

#[test]
fn bessel_outside_ap() {
    // gamma = 3 is outside A_2 for d = 1; necessary conditions hold
    let v = decide_bessel(&h("2", "2", "3"), &h("1", "2", "3")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Unknown, Some(RuleId::OpenRegime)));
    let v = decide_bessel(&h("0", "2", "3"), &h("1", "2", "3")).unwrap();
    assert_eq!(outcome(&v), (Outcome::DoesNotEmbed, Some(RuleId::Nec42)));
}

#[test]
fn sobolev_examples() {
    let v = decide_sobolev(&w("1", "2", "0"), &w("0", "2", "1")).unwrap();
    assert_eq!(v.outcome, Outcome::DoesNotEmbed);
    assert_eq!(v.violation, Some(Violation::WeightIndex));
    let v = decide_sobolev(&w("1", "2", "1/2"), &w("0", "3", "3/4")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::HChar110)));
    let a = w("2", "3", "5");
    assert!(decide_sobolev(&a, &a).unwrap().is_embeds());
    // lower order with the same weight, even outside A_p
    assert!(decide_sobolev(&a, &w("1", "3", "5")).unwrap().is_embeds());
}

#[test]
fn sobolev_rejects_fractional() {
    assert!(matches!(decide_sobolev(&w("1/2", "2", "0"), &w("0", "2", "0")), Err(Error::Family(_))));
}

#[test]
fn cross_examples() {
    // strict shifted gain: the Besov sandwich already settles it
    let v = decide_cross(&b("1", "2", "2", "0"), &f("1/4", "4", "1", "0")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::Subcritical14)));
    // sharp line with p0 < q0 <= p1: only the Jawerth-Franke route applies
    let v = decide_cross(&b("1", "2", "4", "0"), &f("3/4", "4", "1", "0")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::JawerthFranke62)));

    let v = decide_cross(&f("1", "2", "inf", "0"), &b("3/4", "4", "2", "0")).unwrap();
    assert_eq!(outcome(&v), (Outcome::Embeds, Some(RuleId::JawerthFranke63)));

    let v = decide_cross(&h("0", "2", "0"), &b("1", "2", "1", "0")).unwrap();
    assert_eq!(outcome(&v), (Outcome::DoesNotEmbed, Some(RuleId::Nec42)));
    assert_eq!(v.violation, Some(Violation::Smoothness));
}

#[test]
fn cross_rejects_holder() {
    let hol = sp(r#"{"family":"Holder","s":"1/2","dim":1}"#);
    assert!(matches!(decide_cross(&b("1", "2", "2", "0"), &hol), Err(Error::Family(_))));
}

#[test]
fn holder_examples() {
    let v = holder_embedding(&b("2", "2", "2", "0")).unwrap();
    assert_eq!(v.outcome, Outcome::Embeds);
    assert!(v.trace[0].note.contains("BUC^3/2"));
    let v = holder_embedding(&b("3/2", "2", "1", "0")).unwrap();
    assert_eq!(v.outcome, Outcome::Embeds);
    assert!(v.trace[0].note.contains("BUC^1"));
    let v = holder_embedding(&f("3/2", "2", "2", "0")).unwrap();
    assert_eq!(v.outcome, Outcome::Unknown);
    assert!(matches!(holder_embedding(&b("2", "2", "2", "-1/2")), Err(Error::Range(_))));
}

#[test]
fn holder_targets_via_dispatch() {
    let hol = |s: &str| sp(&format!(r#"{{"family":"Holder","s":"{s}","dim":1}}"#));
    assert!(decide(&b("2", "2", "2", "0"), &hol("1")).unwrap().is_embeds());
    let v = decide(&b("2", "2", "2", "0"), &hol("2")).unwrap();
    assert_eq!(v.violation, Some(Violation::Smoothness));
    let v = decide(&b("2", "2", "2", "-1/2"), &hol("1/2")).unwrap();
    assert_eq!(v.violation, Some(Violation::WeightIndex));
}

#[test]
fn lp_examples() {
    let v = lp_target(&b("1", "2", "1", "0"), ext(4, 1), rat(0, 1)).unwrap();
    assert_eq!(v.outcome, Outcome::Embeds);
    assert!(v.cites(RuleId::LpTarget71));
    let v = lp_target(&h("0", "2", "0"), ext(2, 1), rat(0, 1)).unwrap();
    assert_eq!(v.outcome, Outcome::Embeds);
    let v = lp_target(&b("0", "2", "1", "0"), ext(4, 1), rat(0, 1)).unwrap();
    assert_eq!(outcome(&v), (Outcome::DoesNotEmbed, Some(RuleId::Nec42)));
}

#[test]
fn lp_outside_ap_uses_sufficiency_rules() {
    // gamma1 = 4 is outside A_4 for d = 1: the F route still applies
    let v = lp_target(&f("1", "2", "inf", "2"), ext(4, 1), rat(4, 1)).unwrap();
    assert_eq!(v.outcome, Outcome::Embeds);
    let v = decide(&f("1", "2", "inf", "2"), &sp(r#"{"family":"Lp","p":2,"gamma":2,"dim":1}"#)).unwrap();
    assert_eq!(v.outcome, Outcome::Embeds);
    assert!(v.cites(RuleId::SandwichHw));
}

#[test]
fn dimension_mismatch() {
    let a = b("1", "2", "1", "0");
    let mut c = a.clone();
    c.d = 2;
    assert!(matches!(decide(&a, &c), Err(Error::DimensionMismatch(1, 2))));
}

#[test]
fn matrix_examples() {
    let one = embedding_matrix(&[b("1", "2", "1", "0")]);
    assert_eq!(one.outcome(0, 0), Some(Outcome::Embeds));

    let chain = [b("1", "2", "1", "0"), b("0", "4", "1", "0"), b("-1", "8", "1", "0")];
    let m = embedding_matrix(&chain);
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i <= j { Outcome::Embeds } else { Outcome::DoesNotEmbed };
            assert_eq!(m.outcome(i, j), Some(expected), "({i},{j})");
        }
    }
    assert!(m.violations.is_empty());

    let mut bad = b("1", "2", "1", "0");
    bad.gamma = rat(-3, 1);
    let m = embedding_matrix(&[chain[0].clone(), bad]);
    assert_eq!(m.outcome(0, 0), Some(Outcome::Embeds));
    assert!(m.outcome(0, 1).is_none() && m.outcome(1, 0).is_none() && m.outcome(1, 1).is_none());
}

#[test]
fn verdict_json_shape() {
    let v = decide_besov(&b("1", "2", "1", "0"), &b("0", "4", "1", "0")).unwrap();
    let json = serde_json::to_value(&v).unwrap();
    assert_eq!(json["outcome"], "embeds");
    assert_eq!(json["trace"][0]["rule"], "SUBCRITICAL_14");
    assert_eq!(json.as_object().unwrap().len(), 2);
}

#[test]
fn float_scalar_agrees_off_the_boundary() {
    let src = b("1", "2", "1", "0").to_f64();
    let tgt = b("0", "4", "1", "0").to_f64();
    assert!(decide(&src, &tgt).unwrap().is_embeds());
}
