//! Decisions across scales: sandwiches through B and F, Jawerth–Franke
//! improvements, Lebesgue and Hölder targets.

use super::same::{besov_core, potential_core, triebel_core};
use super::{same_dim, Outcome, Pair, RuleCitation, RuleId, Verdict, Violation};
use crate::error::{range, Error, Result};
use crate::params::{in_ap_range, is_one, Extended, Family, SpaceSpec};
use crate::scalar::Scalar;

/// A space related to a given one by an elementary embedding, with the
/// citation that justifies the step (none when it is the space itself).
struct View<S> {
    spec: SpaceSpec<S>,
    cite: Option<RuleCitation>,
}

impl<S: Scalar> View<S> {
    fn same(spec: &SpaceSpec<S>) -> Self {
        View { spec: spec.clone(), cite: None }
    }

    fn via(spec: SpaceSpec<S>, rule: RuleId, note: String) -> Self {
        View { spec, cite: Some(RuleCitation::new(rule, note)) }
    }
}

fn is_potential(f: Family) -> bool {
    matches!(f, Family::BesselPotential | Family::Sobolev)
}

fn ap<S: Scalar>(spec: &SpaceSpec<S>) -> bool {
    !spec.p.is_infinite() && spec.in_ap_range().unwrap_or(false)
}

/// A Besov space containing `x`.
fn besov_above<S: Scalar>(x: &SpaceSpec<S>) -> Option<View<S>> {
    match x.family {
        Family::Besov => Some(View::same(x)),
        Family::TriebelLizorkin => {
            let q = Extended::max(&x.p, &x.q_or_inf());
            Some(View::via(
                x.as_family(Family::Besov, Some(q.clone())),
                RuleId::SandwichBf,
                format!("F^{}_{{{},{}}} -> B^{}_{{{},{q}}}", x.s, x.p, x.q_or_inf(), x.s, x.p),
            ))
        }
        f if is_potential(f) && ap(x) => Some(View::via(
            x.as_family(Family::Besov, Some(Extended::Infinite)),
            RuleId::SandwichHw,
            format!("{x} -> B^{}_{{{},inf}} since gamma = {} is in the A_p range", x.s, x.p, x.gamma),
        )),
        _ => None,
    }
}

/// A Besov space contained in `x`.
fn besov_below<S: Scalar>(x: &SpaceSpec<S>) -> Option<View<S>> {
    match x.family {
        Family::Besov => Some(View::same(x)),
        Family::TriebelLizorkin => {
            let q = Extended::min(&x.p, &x.q_or_inf());
            Some(View::via(
                x.as_family(Family::Besov, Some(q.clone())),
                RuleId::SandwichBf,
                format!("B^{}_{{{},{q}}} -> F^{}_{{{},{}}}", x.s, x.p, x.s, x.p, x.q_or_inf()),
            ))
        }
        f if is_potential(f) => Some(View::via(
            x.as_family(Family::Besov, Some(Extended::from_int(1))),
            RuleId::SandwichHw,
            format!("B^{}_{{{},1}} -> {x} for every power weight", x.s, x.p),
        )),
        _ => None,
    }
}

/// A Triebel–Lizorkin space containing `x`.
fn triebel_above<S: Scalar>(x: &SpaceSpec<S>) -> Option<View<S>> {
    if x.p.is_infinite() {
        return None;
    }
    match x.family {
        Family::TriebelLizorkin => Some(View::same(x)),
        Family::Besov if x.q_or_inf() <= x.p => Some(View::via(
            x.as_family(Family::TriebelLizorkin, x.q.clone()),
            RuleId::SandwichBf,
            format!("B^{}_{{{},{}}} -> F^{}_{{{},{}}} since q <= p", x.s, x.p, x.q_or_inf(), x.s, x.p, x.q_or_inf()),
        )),
        f if is_potential(f) && ap(x) => Some(View::via(
            x.as_family(Family::TriebelLizorkin, Some(Extended::from_int(2))),
            RuleId::SandwichHw,
            format!("{x} = F^{}_{{{},2}} since gamma = {} is in the A_p range", x.s, x.p, x.gamma),
        )),
        _ => None,
    }
}

/// A Triebel–Lizorkin space contained in `x`.
fn triebel_below<S: Scalar>(x: &SpaceSpec<S>) -> Option<View<S>> {
    if x.p.is_infinite() {
        return None;
    }
    match x.family {
        Family::TriebelLizorkin => Some(View::same(x)),
        Family::Besov if x.p <= x.q_or_inf() => Some(View::via(
            x.as_family(Family::TriebelLizorkin, x.q.clone()),
            RuleId::SandwichBf,
            format!("F^{}_{{{},{}}} -> B^{}_{{{},{}}} since p <= q", x.s, x.p, x.q_or_inf(), x.s, x.p, x.q_or_inf()),
        )),
        f if is_potential(f) && ap(x) => Some(View::via(
            x.as_family(Family::TriebelLizorkin, Some(Extended::from_int(2))),
            RuleId::SandwichHw,
            format!("F^{}_{{{},2}} = {x} since gamma = {} is in the A_p range", x.s, x.p, x.gamma),
        )),
        f if is_potential(f) => Some(View::via(
            x.as_family(Family::TriebelLizorkin, Some(Extended::from_int(1))),
            RuleId::SandwichHw,
            format!("F^{}_{{{},1}} -> {x} for every power weight", x.s, x.p),
        )),
        _ => None,
    }
}

fn compose<S: Scalar>(up: View<S>, down: View<S>, inner: Verdict) -> Verdict {
    let head: Vec<RuleCitation> = up.cite.into_iter().chain(down.cite).collect();
    inner.prepend(head)
}

/// Cross-family decision: sandwich sufficiency, Jawerth–Franke, then necessity.
pub fn decide_cross<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    let src = src.validate()?;
    let tgt = tgt.validate()?;
    same_dim(&src, &tgt)?;
    if src.family == tgt.family {
        return Err(Error::Family(format!(
            "decide_cross expects different families, got {} twice",
            src.family.code()
        )));
    }
    cross_core(&src, &tgt)
}

pub(crate) fn cross_core<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    if src.family == Family::Holder || tgt.family == Family::Holder {
        return Err(Error::Family(
            "Holder targets are decided by holder_embedding".into(),
        ));
    }
    let pair = Pair::new(src, tgt)?;

    // (i) sufficiency through a Besov or Triebel-Lizorkin sandwich
    if let (Some(up), Some(down)) = (besov_above(src), besov_below(tgt)) {
        let inner = besov_core(&up.spec, &down.spec)?;
        if inner.is_embeds() {
            return Ok(compose(up, down, inner));
        }
    }
    if let (Some(up), Some(down)) = (triebel_above(src), triebel_below(tgt)) {
        let inner = triebel_core(&up.spec, &down.spec)?;
        if inner.is_embeds() {
            return Ok(compose(up, down, inner));
        }
    }

    // (ii) Jawerth-Franke
    let both_ap = ap(src) && ap(tgt);
    if both_ap && pair.p0 < pair.p1 && pair.weight_ok() && pair.shifted_ge() {
        let cond = format!("p0 = {} < p1 = {}; {}; {}", pair.p0, pair.p1, pair.weight_note(), pair.shifted_note(false));
        let q0 = src.q_or_inf();
        let q1 = tgt.q_or_inf();
        if src.family == Family::Besov && tgt.family != Family::Besov && q0 <= pair.p1 {
            let mut trace = vec![RuleCitation::new(
                RuleId::JawerthFranke62,
                format!("{cond}; q0 = {q0} <= p1 = {}: B^s0_{{p0,p1}} -> F^s1_{{p1,q}} for every q", pair.p1),
            )];
            if is_potential(tgt.family) {
                trace.push(RuleCitation::new(RuleId::SandwichHw, format!("F^{}_{{{},1}} -> {tgt}", tgt.s, tgt.p)));
            }
            return Ok(Verdict::embeds(trace));
        }
        if src.family != Family::Besov && tgt.family == Family::Besov && q1 >= pair.p0 {
            let mut trace = Vec::new();
            if is_potential(src.family) {
                trace.push(RuleCitation::new(
                    RuleId::SandwichHw,
                    format!("{src} = F^{}_{{{},2}}", src.s, src.p),
                ));
            }
            trace.push(RuleCitation::new(
                RuleId::JawerthFranke63,
                format!("{cond}; q1 = {q1} >= p0 = {}: F^s0_{{p0,q}} -> B^s1_{{p1,p0}} for every q", pair.p0),
            ));
            return Ok(Verdict::embeds(trace));
        }
    }

    // (iii) necessity through B_{p0,1} -> src and tgt -> B_{p1,inf}
    let tgt_gate = !is_potential(tgt.family) || ap(tgt) || tgt.s == S::zero();
    if tgt_gate {
        if let Some((cite, violation)) = pair.necessity() {
            let mut trace = Vec::new();
            if src.family != Family::Besov {
                trace.push(RuleCitation::new(
                    RuleId::SandwichBf,
                    format!("B^{}_{{{},1}} -> {src}", src.s, src.p),
                ));
            }
            if tgt.family != Family::Besov {
                let note = if is_potential(tgt.family) && !ap(tgt) {
                    format!("witness norms of {tgt} are plain weighted L^p norms")
                } else {
                    format!("{tgt} -> B^{}_{{{},inf}}", tgt.s, tgt.p)
                };
                trace.push(RuleCitation::new(RuleId::SandwichBf, note));
            }
            trace.push(cite);
            return Ok(Verdict::no(trace, violation));
        }
    }
    if both_ap && pair.p1 < pair.p0 && pair.sig0 == pair.sig1 && f_sharp_cross(src, tgt) {
        return Ok(Verdict::no(
            vec![RuleCitation::new(
                RuleId::FSharpNec55,
                format!(
                    "p1 = {} < p0 = {}; {}; F^s0_{{p0,2}} -> {src} and {tgt} -> F^s1_{{p1,2}}, both weights in A_p",
                    pair.p1,
                    pair.p0,
                    pair.shifted_note(true)
                ),
            )],
            Violation::SharpLine,
        ));
    }
    Ok(Verdict::unknown(vec![RuleCitation::new(
        RuleId::OpenRegime,
        format!(
            "{src} -> {tgt}: no sandwich or Jawerth-Franke route applies and no necessary condition fails ({}; {}; {}; A_p: {} / {})",
            pair.weight_note(),
            pair.dim_note(pair.p1 < pair.p0),
            pair.shifted_note(false),
            ap(src),
            ap(tgt)
        ),
    )]))
}

/// Whether some `F_{p0,q}` with `q ≥ 2` sits inside `src` and `tgt` sits
/// inside some `F_{p1,q}` with `q ≤ 2`.
fn f_sharp_cross<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> bool {
    let two = Extended::from_int(2);
    let src_ok = match src.family {
        Family::TriebelLizorkin => src.q_or_inf() >= two,
        Family::Besov => src.q_or_inf() >= Extended::max(&src.p, &two),
        f => is_potential(f),
    };
    let tgt_ok = match tgt.family {
        Family::TriebelLizorkin => tgt.q_or_inf() <= two,
        Family::Besov => tgt.q_or_inf() <= Extended::min(&tgt.p, &two),
        f => is_potential(f),
    };
    src_ok && tgt_ok
}

/// Order `s1` of the `BUC^{s1}` space that `src` embeds into, if the rule applies.
fn holder_order<S: Scalar>(src: &SpaceSpec<S>) -> Result<std::result::Result<S, String>> {
    if src.family == Family::Holder {
        return Err(Error::Family("source is already a Holder space".into()));
    }
    if src.gamma < S::zero() {
        return range(format!("Holder embedding requires gamma0 >= 0, got {}", src.gamma));
    }
    if is_potential(src.family) && !ap(src) {
        return Ok(Err(format!(
            "{} sources need gamma0 = {} < d(p0-1)",
            src.family.code(),
            src.gamma
        )));
    }
    let s1 = src.indices().shifted_smoothness;
    if s1 > S::zero() && !s1.is_integral() {
        return Ok(Ok(s1));
    }
    if s1 >= S::zero() && s1.is_integral() && src.family == Family::Besov && is_one(&src.q_or_inf()) {
        return Ok(Ok(s1));
    }
    Ok(Err(format!(
        "s0-(d+gamma0)/p0 = {s1} is not a positive non-integer, and the integer case needs a B space with q0 = 1"
    )))
}

/// Embedding of `src` into the unweighted Hölder–Zygmund scale `BUC^{s1}`.
pub fn holder_embedding<S: Scalar>(src: &SpaceSpec<S>) -> Result<Verdict> {
    let src = src.validate()?;
    Ok(match holder_order(&src)? {
        Ok(s1) => Verdict::embeds(vec![RuleCitation::new(
            RuleId::Holder73,
            format!("{src} -> BUC^{s1} with s1 = s0-(d+gamma0)/p0"),
        )]),
        Err(why) => Verdict::unknown(vec![RuleCitation::new(
            RuleId::OpenRegime,
            format!("{src}: {why}; the rule is sufficient only"),
        )]),
    })
}

pub(crate) fn holder_target<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    let st = &tgt.s;
    let i0 = src.indices();
    if i0.weight_index < S::zero() {
        return Ok(Verdict::no(
            vec![RuleCitation::new(
                RuleId::Nec42,
                format!("gamma1/p1 = 0 <= gamma0/p0 = {} fails (the sup-norm target is unweighted)", i0.weight_index),
            )],
            Violation::WeightIndex,
        ));
    }
    if i0.shifted_smoothness < *st {
        return Ok(Verdict::no(
            vec![RuleCitation::new(
                RuleId::Nec42,
                format!(
                    "s0-(d+gamma0)/p0 = {} >= s1 - 0 = {st} fails (target {tgt} sits in B^{st}_{{inf,inf}})",
                    i0.shifted_smoothness
                ),
            )],
            Violation::Smoothness,
        ));
    }
    Ok(match holder_order(src)? {
        Ok(s1) if *st <= s1 => Verdict::embeds(vec![RuleCitation::new(
            RuleId::Holder73,
            format!("{src} -> BUC^{s1} -> BUC^{st}"),
        )]),
        Ok(s1) => Verdict::unknown(vec![RuleCitation::new(
            RuleId::OpenRegime,
            format!("{src} -> BUC^{s1} only; target order {st} not covered"),
        )]),
        Err(why) => Verdict::unknown(vec![RuleCitation::new(
            RuleId::OpenRegime,
            format!("{src}: {why}"),
        )]),
    })
}

/// Embedding into the weighted Lebesgue space `L^{p1}(|x|^{γ1})`.
pub fn lp_target<S: Scalar>(src: &SpaceSpec<S>, p1: Extended<S>, gamma1: S) -> Result<Verdict> {
    let src = src.validate()?;
    if src.family == Family::Holder {
        return Err(Error::Family("Holder spaces are supported only as targets".into()));
    }
    if p1.is_infinite() {
        return range("lp_target requires p1 < inf");
    }
    let tgt = SpaceSpec::lebesgue(p1, gamma1, src.d).validate()?;
    lp_core(&src, &tgt)
}

pub(crate) fn lp_core<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    let ap1 = in_ap_range(&tgt.p, &tgt.gamma, tgt.d)?;
    if is_potential(src.family) && ap(src) && ap1 {
        return potential_core(src, tgt);
    }
    let lp_rule = if src.family == Family::Besov { RuleId::LpTarget71 } else { RuleId::LpTarget72 };
    let f_target = tgt.as_family(Family::TriebelLizorkin, Some(Extended::from_int(1)));
    if let Some(up) = triebel_above(src) {
        let inner = triebel_core(&up.spec, &f_target)?;
        if inner.is_embeds() {
            let mut trace: Vec<RuleCitation> = up.cite.into_iter().collect();
            trace.extend(inner.trace);
            trace.push(RuleCitation::new(
                lp_rule,
                format!("F^0_{{{},1}}(|x|^{}) -> L^{}(|x|^{}) since |f| <= sum_k |S_k f|", tgt.p, tgt.gamma, tgt.p, tgt.gamma),
            ));
            return Ok(Verdict::embeds(trace));
        }
    }
    let b_target = tgt.as_family(Family::Besov, Some(Extended::from_int(1)));
    if let Some(up) = besov_above(src) {
        let inner = besov_core(&up.spec, &b_target)?;
        if inner.is_embeds() {
            let mut trace: Vec<RuleCitation> = up.cite.into_iter().collect();
            trace.extend(inner.trace);
            trace.push(RuleCitation::new(
                RuleId::LpTarget71,
                format!("B^0_{{{},1}}(|x|^{}) -> L^{}(|x|^{}) since |f| <= sum_k |S_k f|", tgt.p, tgt.gamma, tgt.p, tgt.gamma),
            ));
            return Ok(Verdict::embeds(trace));
        }
    }
    let pair = Pair::new(src, tgt)?;
    if let Some((cite, violation)) = pair.necessity() {
        return Ok(Verdict::no(
            vec![
                RuleCitation::new(
                    lp_rule,
                    format!("witness norms evaluated directly in L^{}(|x|^{})", tgt.p, tgt.gamma),
                ),
                cite,
            ],
            violation,
        ));
    }
    let verdict = Verdict::unknown(vec![RuleCitation::new(
        RuleId::OpenRegime,
        format!(
            "{src} -> L^{}(|x|^{}): no sufficient rule applies; {}; {}; {}",
            tgt.p,
            tgt.gamma,
            pair.weight_note(),
            pair.dim_note(pair.p1 < pair.p0),
            pair.shifted_note(false)
        ),
    )]);
    debug_assert_eq!(verdict.outcome, Outcome::Unknown);
    Ok(verdict)
}
