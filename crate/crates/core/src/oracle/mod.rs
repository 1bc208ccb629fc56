//! Exact decision procedures for `E0 ↪ E1` between weighted spaces.
//!
//! Every verdict carries an ordered trace of rule citations whose notes
//! restate the evaluated inequalities with the actual numbers.

mod cross;
mod matrix;
mod same;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Family, SpaceSpec};
use crate::scalar::Scalar;

pub use cross::{decide_cross, holder_embedding, lp_target};
pub use matrix::{embedding_matrix, EmbeddingMatrix, MatrixCell, TransitivityViolation};
pub use same::{decide_besov, decide_bessel, decide_sobolev, decide_triebel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "embeds")]
    Embeds,
    #[serde(rename = "no")]
    DoesNotEmbed,
    #[serde(rename = "unknown")]
    Unknown,
}

/// Identifiers for the conditions the oracle evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    /// Same weight and integrability; compare `s`, then `q`.
    #[serde(rename = "TRIVIAL_13")]
    Trivial13,
    /// Strict shifted-smoothness gain with index conditions.
    #[serde(rename = "SUBCRITICAL_14")]
    Subcritical14,
    /// Equal shifted smoothness, `q0 ≤ q1`.
    #[serde(rename = "SHARP_15")]
    Sharp15,
    /// Triebel–Lizorkin sufficiency, independent of `q`.
    #[serde(rename = "F_SUFFICIENT_17")]
    FSufficient17,
    /// Bessel-potential / Sobolev characterization for `p0 ≤ p1`.
    #[serde(rename = "H_CHAR_110")]
    HChar110,
    /// Bessel-potential / Sobolev characterization for `p1 < p0`.
    #[serde(rename = "PQ_SWAP_114")]
    PqSwap114,
    /// Necessary conditions from peaks, translations and dilations.
    #[serde(rename = "NEC_42")]
    Nec42,
    /// Strict dimension index needed when `p1 < p0`.
    #[serde(rename = "NEC_STRICT_45")]
    NecStrict45,
    #[serde(rename = "SANDWICH_BF")]
    SandwichBf,
    #[serde(rename = "SANDWICH_HW")]
    SandwichHw,
    #[serde(rename = "JAWERTH_FRANKE_62")]
    JawerthFranke62,
    #[serde(rename = "JAWERTH_FRANKE_63")]
    JawerthFranke63,
    #[serde(rename = "LP_TARGET_71")]
    LpTarget71,
    #[serde(rename = "LP_TARGET_72")]
    LpTarget72,
    #[serde(rename = "HOLDER_73")]
    Holder73,
    /// Microscopic index comparison on the sharp line (lacunary sums).
    #[serde(rename = "Q_NECESSITY")]
    QNecessity,
    /// Sharp-line non-embedding for `p1 < p0` between F/H/W spaces.
    #[serde(rename = "F_SHARP_NEC_55")]
    FSharpNec55,
    #[serde(rename = "OPEN_REGIME")]
    OpenRegime,
}

impl RuleId {
    pub const ALL: [RuleId; 18] = [
        RuleId::Trivial13,
        RuleId::Subcritical14,
        RuleId::Sharp15,
        RuleId::FSufficient17,
        RuleId::HChar110,
        RuleId::PqSwap114,
        RuleId::Nec42,
        RuleId::NecStrict45,
        RuleId::SandwichBf,
        RuleId::SandwichHw,
        RuleId::JawerthFranke62,
        RuleId::JawerthFranke63,
        RuleId::LpTarget71,
        RuleId::LpTarget72,
        RuleId::Holder73,
        RuleId::QNecessity,
        RuleId::FSharpNec55,
        RuleId::OpenRegime,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RuleId::Trivial13 => "TRIVIAL_13",
            RuleId::Subcritical14 => "SUBCRITICAL_14",
            RuleId::Sharp15 => "SHARP_15",
            RuleId::FSufficient17 => "F_SUFFICIENT_17",
            RuleId::HChar110 => "H_CHAR_110",
            RuleId::PqSwap114 => "PQ_SWAP_114",
            RuleId::Nec42 => "NEC_42",
            RuleId::NecStrict45 => "NEC_STRICT_45",
            RuleId::SandwichBf => "SANDWICH_BF",
            RuleId::SandwichHw => "SANDWICH_HW",
            RuleId::JawerthFranke62 => "JAWERTH_FRANKE_62",
            RuleId::JawerthFranke63 => "JAWERTH_FRANKE_63",
            RuleId::LpTarget71 => "LP_TARGET_71",
            RuleId::LpTarget72 => "LP_TARGET_72",
            RuleId::Holder73 => "HOLDER_73",
            RuleId::QNecessity => "Q_NECESSITY",
            RuleId::FSharpNec55 => "F_SHARP_NEC_55",
            RuleId::OpenRegime => "OPEN_REGIME",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCitation {
    pub rule: RuleId,
    pub note: String,
}

impl RuleCitation {
    pub fn new(rule: RuleId, note: impl Into<String>) -> Self {
        RuleCitation { rule, note: note.into() }
    }
}

/// Which necessary condition a negative verdict rests on. Used to pick the
/// witness family that demonstrates the failure numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    /// `s0 − (d+γ0)/p0 < s1 − (d+γ1)/p1`
    Smoothness,
    /// `γ1/p1 > γ0/p0`
    WeightIndex,
    /// `(d+γ1)/p1 > (d+γ0)/p0`
    DimIndex,
    /// `(d+γ1)/p1 = (d+γ0)/p0` with `p1 < p0`
    DimStrict,
    /// Sharp line with `q0 > q1`
    Microscopic,
    /// Sharp line with `p1 < p0` between F/H/W spaces
    SharpLine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub trace: Vec<RuleCitation>,
    #[serde(skip)]
    pub violation: Option<Violation>,
}

impl Verdict {
    pub(crate) fn embeds(trace: Vec<RuleCitation>) -> Self {
        Verdict { outcome: Outcome::Embeds, trace, violation: None }
    }

    pub(crate) fn no(trace: Vec<RuleCitation>, violation: Violation) -> Self {
        Verdict { outcome: Outcome::DoesNotEmbed, trace, violation: Some(violation) }
    }

    pub(crate) fn unknown(trace: Vec<RuleCitation>) -> Self {
        Verdict { outcome: Outcome::Unknown, trace, violation: None }
    }

    pub(crate) fn prepend(mut self, mut head: Vec<RuleCitation>) -> Self {
        head.append(&mut self.trace);
        self.trace = head;
        self
    }

    pub fn is_embeds(&self) -> bool {
        self.outcome == Outcome::Embeds
    }

    pub fn rules(&self) -> Vec<RuleId> {
        self.trace.iter().map(|c| c.rule).collect()
    }

    pub fn cites(&self, rule: RuleId) -> bool {
        self.trace.iter().any(|c| c.rule == rule)
    }

    /// The rule that settled the verdict: the first necessity citation for
    /// negative verdicts, the last citation otherwise.
    pub fn deciding_rule(&self) -> Option<RuleId> {
        match self.outcome {
            Outcome::DoesNotEmbed => self
                .trace
                .iter()
                .find(|c| {
                    matches!(
                        c.rule,
                        RuleId::Nec42
                            | RuleId::NecStrict45
                            | RuleId::QNecessity
                            | RuleId::FSharpNec55
                            | RuleId::PqSwap114
                            | RuleId::HChar110
                    )
                })
                .map(|c| c.rule),
            _ => self.trace.last().map(|c| c.rule),
        }
    }
}

/// Derived indices of a (source, target) pair with the comparisons every
/// rule is built from.
#[derive(Clone, Debug)]
pub(crate) struct Pair<S> {
    pub a0: S,
    pub b0: S,
    pub sig0: S,
    pub a1: S,
    pub b1: S,
    pub sig1: S,
    pub p0: crate::params::Extended<S>,
    pub p1: crate::params::Extended<S>,
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "fails"
    }
}

impl<S: Scalar> Pair<S> {
    pub fn new(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Self> {
        let i0 = src.indices();
        let i1 = tgt.indices();
        let pair = Pair {
            a0: i0.weight_index,
            b0: i0.dim_index,
            sig0: i0.shifted_smoothness,
            a1: i1.weight_index,
            b1: i1.dim_index,
            sig1: i1.shifted_smoothness,
            p0: src.p.clone(),
            p1: tgt.p.clone(),
        };
        pair.audit()?;
        Ok(pair)
    }

    pub fn weight_ok(&self) -> bool {
        self.a1 <= self.a0
    }
    pub fn dim_ok(&self) -> bool {
        self.b1 <= self.b0
    }
    pub fn dim_strict(&self) -> bool {
        self.b1 < self.b0
    }
    pub fn shifted_ge(&self) -> bool {
        self.sig0 >= self.sig1
    }
    pub fn shifted_gt(&self) -> bool {
        self.sig0 > self.sig1
    }

    pub fn weight_note(&self) -> String {
        format!("gamma1/p1 = {} <= gamma0/p0 = {} {}", self.a1, self.a0, mark(self.weight_ok()))
    }
    pub fn dim_note(&self, strict: bool) -> String {
        let (op, ok) = if strict { ("<", self.dim_strict()) } else { ("<=", self.dim_ok()) };
        format!("(d+gamma1)/p1 = {} {op} (d+gamma0)/p0 = {} {}", self.b1, self.b0, mark(ok))
    }
    pub fn shifted_note(&self, strict: bool) -> String {
        let (op, ok) = if strict { (">", self.shifted_gt()) } else { (">=", self.shifted_ge()) };
        format!(
            "s0-(d+gamma0)/p0 = {} {op} s1-(d+gamma1)/p1 = {} {}",
            self.sig0,
            self.sig1,
            mark(ok)
        )
    }

    /// Redundancy implications between the index conditions. They are
    /// algebraic identities; a failure means corrupted arithmetic.
    fn audit(&self) -> Result<()> {
        if !S::EXACT {
            return Ok(());
        }
        if self.p0 < self.p1 && self.weight_ok() && !self.dim_strict() {
            return Err(Error::Condition(format!(
                "redundancy audit: p0 < p1 and {} but {}",
                self.weight_note(),
                self.dim_note(true)
            )));
        }
        if self.p1 < self.p0 && self.dim_strict() && self.a1 >= self.a0 {
            return Err(Error::Condition(format!(
                "redundancy audit: p1 < p0 and {} but gamma1/p1 = {} >= gamma0/p0 = {}",
                self.dim_note(true),
                self.a1,
                self.a0
            )));
        }
        Ok(())
    }

    /// First failing necessary condition: the non-strict index inequalities,
    /// then strictness of the dimension index when `p1 < p0`.
    pub fn necessity(&self) -> Option<(RuleCitation, Violation)> {
        if !self.shifted_ge() {
            return Some((RuleCitation::new(RuleId::Nec42, self.shifted_note(false)), Violation::Smoothness));
        }
        if !self.weight_ok() {
            return Some((RuleCitation::new(RuleId::Nec42, self.weight_note()), Violation::WeightIndex));
        }
        if !self.dim_ok() {
            return Some((RuleCitation::new(RuleId::Nec42, self.dim_note(false)), Violation::DimIndex));
        }
        if self.p1 < self.p0 && !self.dim_strict() {
            return Some((
                RuleCitation::new(
                    RuleId::NecStrict45,
                    format!("p1 = {} < p0 = {} requires {}", self.p1, self.p0, self.dim_note(true)),
                ),
                Violation::DimStrict,
            ));
        }
        None
    }

    /// Like [`Pair::necessity`], for call sites where a violation is implied
    /// algebraically. Floating-point rounding can hide it; then the
    /// borderline comparison itself is cited.
    pub fn necessity_or_borderline(&self) -> (RuleCitation, Violation) {
        self.necessity().unwrap_or_else(|| {
            (
                RuleCitation::new(
                    RuleId::Nec42,
                    format!(
                        "borderline comparison under rounding: {}; {}",
                        self.weight_note(),
                        self.dim_note(true)
                    ),
                ),
                Violation::DimIndex,
            )
        })
    }
}

fn same_dim<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<()> {
    if src.d != tgt.d {
        return Err(Error::DimensionMismatch(src.d, tgt.d));
    }
    Ok(())
}

/// Decide `src ↪ tgt` for any two valid specs, routing to the matching procedure.
pub fn decide<S: Scalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<Verdict> {
    use Family::*;
    let lebesgue_target = tgt.family == Lebesgue;
    let src = src.validate()?;
    let tgt = tgt.validate()?;
    same_dim(&src, &tgt)?;
    if src.family == Holder {
        return Err(Error::Family("Holder spaces are supported only as targets".into()));
    }
    if tgt.family == Holder {
        return cross::holder_target(&src, &tgt);
    }
    // a Lebesgue target goes through its own procedure first
    if lebesgue_target {
        let lp = cross::lp_core(&src, &tgt)?;
        if lp.outcome != Outcome::Unknown {
            return Ok(lp);
        }
    }
    let verdict = match (src.family, tgt.family) {
        (Besov, Besov) => same::besov_core(&src, &tgt)?,
        (TriebelLizorkin, TriebelLizorkin) => same::triebel_core(&src, &tgt)?,
        (BesselPotential | Sobolev, BesselPotential | Sobolev) => same::potential_core(&src, &tgt)?,
        _ => cross::cross_core(&src, &tgt)?,
    };
    if verdict.outcome == Outcome::Unknown
        && tgt.family == BesselPotential
        && tgt.s == S::zero()
    {
        let lp = cross::lp_core(&src, &tgt)?;
        if lp.outcome != Outcome::Unknown {
            return Ok(lp);
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests;
