use num_traits::{One, Zero};
use proptest::prelude::*;

use powemb::oracle::{decide_besov, decide_triebel, embedding_matrix};
use powemb::{decide, in_ap_range, rat, Extended, Outcome, Rational, RuleId, Spec};

fn r() -> impl Strategy<Value = Rational> {
    (-24i64..=36, prop::sample::select(vec![1i64, 2, 3, 4, 6])).prop_map(|(n, d)| rat(n, d))
}

fn finite_p() -> impl Strategy<Value = Extended<Rational>> {
    (7i64..=48, prop::sample::select(vec![4i64, 6])).prop_map(|(n, d)| Extended::Finite(rat(n, d)))
}

fn p() -> impl Strategy<Value = Extended<Rational>> {
    prop_oneof![9 => finite_p(), 1 => Just(Extended::Infinite)]
}

fn q() -> impl Strategy<Value = Extended<Rational>> {
    prop::sample::select(vec![
        Extended::Finite(rat(1, 1)),
        Extended::Finite(rat(2, 1)),
        Extended::Finite(rat(5, 2)),
        Extended::Infinite,
    ])
}

fn gamma(d: u32) -> impl Strategy<Value = Rational> {
    let lo = -(d as i64) * 12 + 1;
    (lo..=36i64).prop_map(|n| rat(n, 12))
}

fn besov(d: u32) -> impl Strategy<Value = Spec> {
    (r(), p(), q(), gamma(d)).prop_map(move |(s, p, q, g)| Spec::besov(s, p, q, g, d))
}

fn triebel(d: u32) -> impl Strategy<Value = Spec> {
    (r(), finite_p(), q(), gamma(d))
        .prop_map(move |(s, p, q, g)| Spec::triebel(s, p, q, g, d))
}

fn recip(p: &Extended<Rational>) -> Rational {
    match p {
        Extended::Finite(v) => v.recip(),
        Extended::Infinite => Rational::zero(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn shifted_plus_dim_index_is_s(a in besov(2)) {
        let i = a.indices();
        prop_assert_eq!(i.shifted_smoothness + i.dim_index, a.s);
    }

    #[test]
    fn ap_range_is_monotone_in_p(g in gamma(2), n in 5i64..40) {
        let p0 = Extended::Finite(rat(n, 4));
        let p1 = Extended::Finite(rat(n + 1, 4));
        if in_ap_range(&p0, &g, 2).unwrap() {
            prop_assert!(in_ap_range(&p1, &g, 2).unwrap());
        }
    }

    #[test]
    fn validate_is_idempotent(a in besov(1), t in triebel(3)) {
        for x in [a, t] {
            let v = x.validate().unwrap();
            prop_assert_eq!(v.validate().unwrap(), v);
        }
    }

    #[test]
    fn besov_is_never_unknown(a in besov(1), b in besov(1)) {
        prop_assert_ne!(decide_besov(&a, &b).unwrap().outcome, Outcome::Unknown);
    }

    #[test]
    fn verdicts_carry_a_trace(a in triebel(2), b in triebel(2)) {
        let v = decide_triebel(&a, &b).unwrap();
        prop_assert!(!v.trace.is_empty());
        if v.outcome == Outcome::Unknown {
            prop_assert!(v.cites(RuleId::OpenRegime));
        }
    }

    #[test]
    fn unweighted_besov_is_classical(a in besov(2), b in besov(2)) {
        let a = Spec { gamma: Rational::zero(), ..a };
        let b = Spec { gamma: Rational::zero(), ..b };
        prop_assume!(recip(&a.p) >= recip(&b.p));
        let d = Rational::from_integer(2.into());
        let sh0 = a.s.clone() - d.clone() * recip(&a.p);
        let sh1 = b.s.clone() - d * recip(&b.p);
        let (q0, q1) = (recip(a.q.as_ref().unwrap()), recip(b.q.as_ref().unwrap()));
        let expected = sh0 > sh1 || (sh0 == sh1 && q0 >= q1);
        let v = decide_besov(&a, &b).unwrap();
        prop_assert_eq!(v.outcome == Outcome::Embeds, expected, "{} -> {}: {:?}", a, b, v.outcome);
    }

    #[test]
    fn triebel_below_the_sharp_line_ignores_q(a in triebel(1), b in triebel(1), gap in 1i64..24, q0 in q(), q1 in q()) {
        let (a, b) = if recip(&a.p) >= recip(&b.p) { (a, b) } else { (b, a) };
        // place the target strictly below the source's sharp line
        let s1 = a.indices().shifted_smoothness + b.indices().dim_index - rat(gap, 12);
        let b = Spec { s: s1, ..b };
        let v = decide_triebel(&a, &b).unwrap();
        let w = decide_triebel(&Spec { q: Some(q0), ..a.clone() }, &Spec { q: Some(q1), ..b.clone() }).unwrap();
        prop_assert_eq!(v.outcome, w.outcome);
    }

    #[test]
    fn float_and_exact_agree_away_from_boundaries(a in besov(1), b in besov(1)) {
        let exact = decide_besov(&a, &b).unwrap();
        let (i0, i1) = (a.indices(), b.indices());
        prop_assume!(i0.shifted_smoothness != i1.shifted_smoothness);
        prop_assume!(i0.dim_index != i1.dim_index && i0.weight_index != i1.weight_index);
        let float = decide_besov(&a.to_f64(), &b.to_f64()).unwrap();
        prop_assert_eq!(exact.outcome, float.outcome);
    }
}

#[test]
fn matrix_chain_is_upper_triangular() {
    let one = Extended::Finite(Rational::one());
    let specs: Vec<Spec> = [(1, 2), (0, 4), (-1, 8)]
        .iter()
        .map(|&(s, p)| Spec::besov(rat(s, 1), Extended::Finite(rat(p, 1)), one.clone(), Rational::zero(), 1))
        .collect();
    let m = embedding_matrix(&specs);
    for i in 0..3 {
        for j in 0..3 {
            let want = if i <= j { Outcome::Embeds } else { Outcome::DoesNotEmbed };
            assert_eq!(m.outcome(i, j), Some(want), "cell ({i}, {j})");
        }
    }
}

#[test]
fn lebesgue_targets_use_their_own_rules() {
    let src = Spec::besov(rat(1, 1), Extended::Finite(rat(2, 1)), Extended::Finite(rat(1, 1)), Rational::zero(), 1);
    let tgt = Spec::lebesgue(Extended::Finite(rat(4, 1)), Rational::zero(), 1);
    let v = decide(&src, &tgt).unwrap();
    assert_eq!(v.outcome, Outcome::Embeds);
    assert!(v.cites(RuleId::LpTarget71));
}
