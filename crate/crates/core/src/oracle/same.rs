//! Decisions between two spaces of the same scale.

use super::{same_dim, Outcome, Pair, RuleCitation, RuleId, Verdict, Violation};
use crate::error::{Error, Result};
use crate::params::{Family, SpaceSpec};
use crate::scalar::Scalar;

fn expect_family<S: Scalar>(spec: &SpaceSpec<S>, families: &[Family], op: &str) -> Result<()> {
    if families.contains(&spec.family) {
        Ok(())
    } else {
        Err(Error::Family(format!(
            "{op} expects {} spaces, got {}",
            families.iter().map(|f| f.code()).collect::<Vec<_>>().join("/"),
            spec
        )))
    }
}

fn prepare<S: Scalar>(
    src: &SpaceSpec<S>,
    tgt: &SpaceSpec<S>,
    families: &[Family],
    op: &str,
) -> Result<(SpaceSpec<S>, SpaceSpec<S>)> {
    let src = src.validate()?;
    let tgt = tgt.validate()?;
    expect_family(&src, families, op)?;
    expect_family(&tgt, families, op)?;
    same_dim(&src, &tgt)?;
    Ok((src, tgt))
}

/// Besov into Besov. Complete: never returns `Unknown`.
pub fn decide_besov<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    let (src, tgt) = prepare(src, tgt, &[Family::Besov], "decide_besov")?;
    besov_core(&src, &tgt)
}

/// Triebel–Lizorkin into Triebel–Lizorkin.
pub fn decide_triebel<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    let (src, tgt) = prepare(src, tgt, &[Family::TriebelLizorkin], "decide_triebel")?;
    triebel_core(&src, &tgt)
}

/// Bessel-potential into Bessel-potential.
pub fn decide_bessel<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    let (src, tgt) = prepare(src, tgt, &[Family::BesselPotential], "decide_bessel")?;
    potential_core(&src, &tgt)
}

/// Integer-order Sobolev into integer-order Sobolev.
pub fn decide_sobolev<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    let (src, tgt) = prepare(src, tgt, &[Family::Sobolev], "decide_sobolev")?;
    potential_core(&src, &tgt)
}

/// Same weight and integrability. At `p = ∞` the weight drops out of the norm.
fn same_base<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> bool {
    src.p == tgt.p && (src.gamma == tgt.gamma || src.p.is_infinite())
}

fn trivial_note<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> String {
    format!(
        "same weight and p (p = {}, gamma0 = {}, gamma1 = {}); s0 = {} vs s1 = {}, q0 = {} vs q1 = {}",
        src.p,
        src.gamma,
        tgt.gamma,
        src.s,
        tgt.s,
        src.q_or_inf(),
        tgt.q_or_inf()
    )
}

/// On a shared weight and `p`: embeds iff `s0 > s1` or (`s0 = s1` and `q0 ≤ q1`).
fn trivial_line<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Verdict {
    let note = trivial_note(src, tgt);
    if src.s > tgt.s || (src.s == tgt.s && src.q_or_inf() <= tgt.q_or_inf()) {
        Verdict::embeds(vec![RuleCitation::new(RuleId::Trivial13, note)])
    } else if src.s < tgt.s {
        Verdict::no(
            vec![RuleCitation::new(RuleId::Nec42, format!("{note}; s0 < s1"))],
            Violation::Smoothness,
        )
    } else {
        Verdict::no(
            vec![RuleCitation::new(
                RuleId::QNecessity,
                format!("{note}; equal smoothness needs q0 = {} <= q1 = {}", src.q_or_inf(), tgt.q_or_inf()),
            )],
            Violation::Microscopic,
        )
    }
}

pub(crate) fn besov_core<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    if same_base(src, tgt) {
        return Ok(trivial_line(src, tgt));
    }
    let pair = Pair::new(src, tgt)?;
    let (q0, q1) = (src.q_or_inf(), tgt.q_or_inf());
    if pair.weight_ok() && pair.dim_strict() {
        if pair.shifted_gt() {
            return Ok(Verdict::embeds(vec![RuleCitation::new(
                RuleId::Subcritical14,
                format!("{}; {}; {}", pair.weight_note(), pair.dim_note(true), pair.shifted_note(true)),
            )]));
        }
        if pair.sig0 == pair.sig1 {
            let head = format!("{}; {}; {}", pair.weight_note(), pair.dim_note(true), pair.shifted_note(false));
            if q0 <= q1 {
                return Ok(Verdict::embeds(vec![RuleCitation::new(
                    RuleId::Sharp15,
                    format!("{head}; q0 = {q0} <= q1 = {q1} holds"),
                )]));
            }
            return Ok(Verdict::no(
                vec![RuleCitation::new(
                    RuleId::QNecessity,
                    format!("{head}; sharp line requires q0 = {q0} <= q1 = {q1} fails"),
                )],
                Violation::Microscopic,
            ));
        }
    }
    let (cite, violation) = pair.necessity_or_borderline();
    Ok(Verdict::no(vec![cite], violation))
}

fn f_sharp_applies<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<bool> {
    let two = crate::params::Extended::from_int(2);
    Ok(src.q_or_inf() >= two
        && tgt.q_or_inf() <= two
        && src.in_ap_range()?
        && tgt.in_ap_range()?)
}

pub(crate) fn triebel_core<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    if same_base(src, tgt) {
        return Ok(trivial_line(src, tgt));
    }
    let pair = Pair::new(src, tgt)?;
    if pair.p0 <= pair.p1 {
        if pair.weight_ok() && pair.dim_strict() && pair.shifted_ge() {
            return Ok(Verdict::embeds(vec![RuleCitation::new(
                RuleId::FSufficient17,
                format!(
                    "{}; {}; {}; q0 = {}, q1 = {} play no role",
                    pair.weight_note(),
                    pair.dim_note(true),
                    pair.shifted_note(false),
                    src.q_or_inf(),
                    tgt.q_or_inf()
                ),
            )]));
        }
        let (cite, violation) = pair.necessity_or_borderline();
        return Ok(Verdict::no(vec![cite], violation));
    }
    if let Some((cite, violation)) = pair.necessity() {
        return Ok(Verdict::no(vec![cite], violation));
    }
    if pair.shifted_gt() {
        let q0 = src.q_or_inf();
        let q1 = tgt.q_or_inf();
        return Ok(Verdict::embeds(vec![
            RuleCitation::new(
                RuleId::SandwichBf,
                format!(
                    "F^s0_{{p0,{q0}}} -> B^s0_{{p0,{}}} and B^s1_{{p1,{}}} -> F^s1_{{p1,{q1}}}",
                    crate::params::Extended::max(&pair.p0, &q0),
                    crate::params::Extended::min(&pair.p1, &q1),
                ),
            ),
            RuleCitation::new(
                RuleId::Subcritical14,
                format!("{}; {}; {}", pair.weight_note(), pair.dim_note(true), pair.shifted_note(true)),
            ),
        ]));
    }
    let sharp = format!("p1 = {} < p0 = {}; {}", pair.p1, pair.p0, pair.shifted_note(true));
    if f_sharp_applies(src, tgt)? {
        return Ok(Verdict::no(
            vec![RuleCitation::new(
                RuleId::FSharpNec55,
                format!(
                    "{sharp}; q0 = {} in [2,inf], q1 = {} in [1,2], both weights in A_p",
                    src.q_or_inf(),
                    tgt.q_or_inf()
                ),
            )],
            Violation::SharpLine,
        ));
    }
    Ok(Verdict::unknown(vec![RuleCitation::new(
        RuleId::OpenRegime,
        format!(
            "{sharp}; sharp case with q0 = {}, q1 = {} outside [2,inf] x [1,2] or weights outside A_p is not characterized",
            src.q_or_inf(),
            tgt.q_or_inf()
        ),
    )]))
}

/// Shared table for `H` and integer-order `W`, including mixed pairs.
pub(crate) fn potential_core<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    let base = src.p == tgt.p && src.gamma == tgt.gamma;
    if base && src.s == tgt.s && src.family == tgt.family {
        return Ok(Verdict::embeds(vec![RuleCitation::new(
            RuleId::Trivial13,
            format!("identical spaces {src}"),
        )]));
    }
    if base && src.family == Family::Sobolev && tgt.family == Family::Sobolev && src.s >= tgt.s {
        return Ok(Verdict::embeds(vec![RuleCitation::new(
            RuleId::Trivial13,
            format!(
                "same weight and p; order m0 = {} >= m1 = {}: the W^m1 norm is part of the W^m0 norm",
                src.s, tgt.s
            ),
        )]));
    }
    let pair = Pair::new(src, tgt)?;
    let ap0 = src.in_ap_range()?;
    let ap1 = tgt.in_ap_range()?;
    if ap0 && ap1 {
        let mut head = Vec::new();
        if src.family != tgt.family {
            head.push(RuleCitation::new(
                RuleId::SandwichHw,
                "W^{m,p}(w) = H^{m,p}(w) for integer m and w in A_p",
            ));
        }
        let verdict = if pair.p0 <= pair.p1 {
            let note = format!("{}; {}", pair.weight_note(), pair.shifted_note(false));
            if pair.weight_ok() && pair.shifted_ge() {
                Verdict::embeds(vec![RuleCitation::new(RuleId::HChar110, note)])
            } else {
                let (cite, violation) = pair.necessity_or_borderline();
                Verdict::no(vec![RuleCitation::new(RuleId::HChar110, note), cite], violation)
            }
        } else {
            let note = format!(
                "p1 = {} < p0 = {}: {}; {}",
                pair.p1,
                pair.p0,
                pair.dim_note(true),
                pair.shifted_note(true)
            );
            if pair.dim_strict() && pair.shifted_gt() {
                Verdict::embeds(vec![RuleCitation::new(RuleId::PqSwap114, note)])
            } else if let Some((cite, violation)) = pair.necessity() {
                Verdict::no(vec![cite], violation)
            } else {
                Verdict::no(
                    vec![RuleCitation::new(
                        RuleId::PqSwap114,
                        format!("{note}; the sharp case admits no embedding"),
                    )],
                    Violation::SharpLine,
                )
            }
        };
        return Ok(verdict.prepend(head));
    }
    let regime = format!(
        "gamma0 = {} in A_{}: {}, gamma1 = {} in A_{}: {}",
        src.gamma, src.p, ap0, tgt.gamma, tgt.p, ap1
    );
    if let Some((cite, violation)) = pair.necessity() {
        return Ok(Verdict::no(vec![cite], violation));
    }
    let conds = if pair.p1 < pair.p0 {
        format!("{}; {}; {}", pair.weight_note(), pair.dim_note(true), pair.shifted_note(false))
    } else {
        format!("{}; {}; {}", pair.weight_note(), pair.dim_note(false), pair.shifted_note(false))
    };
    let verdict = Verdict::unknown(vec![RuleCitation::new(
        RuleId::OpenRegime,
        format!("{regime}; necessary conditions hold ({conds}) but sufficiency outside A_p is open"),
    )]);
    debug_assert_eq!(verdict.outcome, Outcome::Unknown);
    Ok(verdict)
}
