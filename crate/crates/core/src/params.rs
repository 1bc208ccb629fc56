//! Space descriptors, validation and the derived indices
//! `γ/p`, `(d+γ)/p` and `s − (d+γ)/p` that every embedding condition compares.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{range, Error, Result};
use crate::scalar::Scalar;

/// A value in `(0, ∞]`. Infinity is explicit, never a large float.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extended<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Extended<S> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }

    /// `1/x` with `1/∞ = 0`.
    pub fn reciprocal(&self) -> S {
        self.divide(&S::one())
    }

    /// `num / x` with `num/∞ = 0`.
    pub fn divide(&self, num: &S) -> S {
        match self {
            Extended::Finite(x) => num.clone() / x.clone(),
            Extended::Infinite => S::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(x) => x.to_f64(),
            Extended::Infinite => f64::INFINITY,
        }
    }

    pub fn min(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn from_int(n: i64) -> Self {
        Extended::Finite(S::from_int(n))
    }
}

impl<S: Scalar> From<S> for Extended<S> {
    fn from(x: S) -> Self {
        Extended::Finite(x)
    }
}

impl<S: Scalar> PartialOrd for Extended<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Extended::Infinite, Extended::Infinite) => Some(Ordering::Equal),
            (Extended::Infinite, _) => Some(Ordering::Greater),
            (_, Extended::Infinite) => Some(Ordering::Less),
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<S: Scalar> fmt::Display for Extended<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "B")]
    Besov,
    #[serde(rename = "F")]
    TriebelLizorkin,
    #[serde(rename = "H")]
    BesselPotential,
    #[serde(rename = "W")]
    Sobolev,
    #[serde(rename = "Lp")]
    Lebesgue,
    #[serde(rename = "Holder", alias = "BUC")]
    Holder,
}

impl Family {
    pub fn code(self) -> &'static str {
        match self {
            Family::Besov => "B",
            Family::TriebelLizorkin => "F",
            Family::BesselPotential => "H",
            Family::Sobolev => "W",
            Family::Lebesgue => "Lp",
            Family::Holder => "Holder",
        }
    }

    pub fn has_q(self) -> bool {
        matches!(self, Family::Besov | Family::TriebelLizorkin)
    }
}

/// One weighted smoothness space with weight `|x|^γ` on `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec<S> {
    pub family: Family,
    pub s: S,
    pub p: Extended<S>,
    /// Microscopic index; present for `B` and `F` only.
    pub q: Option<Extended<S>>,
    pub gamma: S,
    pub d: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivedIndices<S> {
    /// `s − (d+γ)/p`
    pub shifted_smoothness: S,
    /// `γ/p`
    pub weight_index: S,
    /// `(d+γ)/p`
    pub dim_index: S,
}

impl<S: Scalar> SpaceSpec<S> {
    pub fn new(
        family: Family,
        s: S,
        p: Extended<S>,
        q: Option<Extended<S>>,
        gamma: S,
        d: u32,
    ) -> Self {
        SpaceSpec { family, s, p, q, gamma, d }
    }

    pub fn besov(s: S, p: Extended<S>, q: Extended<S>, gamma: S, d: u32) -> Self {
        Self::new(Family::Besov, s, p, Some(q), gamma, d)
    }

    pub fn triebel(s: S, p: Extended<S>, q: Extended<S>, gamma: S, d: u32) -> Self {
        Self::new(Family::TriebelLizorkin, s, p, Some(q), gamma, d)
    }

    pub fn bessel(s: S, p: Extended<S>, gamma: S, d: u32) -> Self {
        Self::new(Family::BesselPotential, s, p, None, gamma, d)
    }

    pub fn sobolev(m: S, p: Extended<S>, gamma: S, d: u32) -> Self {
        Self::new(Family::Sobolev, m, p, None, gamma, d)
    }

    pub fn lebesgue(p: Extended<S>, gamma: S, d: u32) -> Self {
        Self::new(Family::Lebesgue, S::zero(), p, None, gamma, d)
    }

    pub fn holder(s: S, d: u32) -> Self {
        Self::new(Family::Holder, s, Extended::Infinite, None, S::zero(), d)
    }

    /// Check definitional ranges and canonicalize: fractional `W` becomes
    /// `B_{p,p}`, `Lp` becomes `H` with `s = 0`.
    pub fn validate(&self) -> Result<Self> {
        if self.d == 0 {
            return range("dimension must be at least 1");
        }
        let d = S::from_int(i64::from(self.d));
        if self.family == Family::Holder {
            if self.s <= S::zero() {
                return range(format!("Holder smoothness must be positive, got {}", self.s));
            }
            return Ok(SpaceSpec::holder(self.s.clone(), self.d));
        }
        if self.gamma <= -d.clone() {
            return range(format!(
                "weight exponent gamma = {} must exceed -d = -{}",
                self.gamma, self.d
            ));
        }
        if let Extended::Finite(p) = &self.p {
            if *p <= S::one() {
                return range(format!("p = {p} must exceed 1"));
            }
        }
        if self.family.has_q() {
            match &self.q {
                None => return range(format!("{} space requires q", self.family.code())),
                Some(Extended::Finite(q)) if *q < S::one() => {
                    return range(format!("q = {q} must be at least 1"))
                }
                _ => {}
            }
        } else if self.q.is_some() && self.family != Family::Sobolev {
            return range(format!("{} space takes no q", self.family.code()));
        }
        match self.family {
            Family::TriebelLizorkin | Family::BesselPotential | Family::Lebesgue
                if self.p.is_infinite() =>
            {
                range(format!("{} space requires p < inf", self.family.code()))
            }
            Family::Lebesgue => Ok(SpaceSpec::bessel(
                S::zero(),
                self.p.clone(),
                self.gamma.clone(),
                self.d,
            )),
            Family::Sobolev => {
                if self.s.is_negative() {
                    return range(format!("Sobolev order must be nonnegative, got {}", self.s));
                }
                if self.p.is_infinite() {
                    return range("W space requires p < inf");
                }
                if let Some(q) = &self.q {
                    if self.s.is_integral() || *q != self.p {
                        return range("W space takes no q");
                    }
                }
                if self.s.is_integral() {
                    Ok(SpaceSpec::sobolev(self.s.clone(), self.p.clone(), self.gamma.clone(), self.d))
                } else {
                    Ok(SpaceSpec::besov(
                        self.s.clone(),
                        self.p.clone(),
                        self.p.clone(),
                        self.gamma.clone(),
                        self.d,
                    ))
                }
            }
            _ => Ok(self.clone()),
        }
    }

    pub fn indices(&self) -> DerivedIndices<S> {
        let d = S::from_int(i64::from(self.d));
        let dim_index = self.p.divide(&(d + self.gamma.clone()));
        DerivedIndices {
            shifted_smoothness: self.s.clone() - dim_index.clone(),
            weight_index: self.p.divide(&self.gamma),
            dim_index,
        }
    }

    /// Whether `|x|^γ` belongs to the Muckenhoupt class `A_p`.
    pub fn in_ap_range(&self) -> Result<bool> {
        in_ap_range(&self.p, &self.gamma, self.d)
    }

    pub fn q_or_inf(&self) -> Extended<S> {
        self.q.clone().unwrap_or(Extended::Infinite)
    }

    pub fn with_q(&self, q: Extended<S>) -> Self {
        let mut out = self.clone();
        out.q = Some(q);
        out
    }

    /// Same `s, p, γ, d` in a different family.
    pub fn as_family(&self, family: Family, q: Option<Extended<S>>) -> Self {
        SpaceSpec { family, q, ..self.clone() }
    }

    pub fn to_f64(&self) -> SpaceSpec<f64> {
        SpaceSpec {
            family: self.family,
            s: self.s.to_f64(),
            p: match &self.p {
                Extended::Finite(p) => Extended::Finite(p.to_f64()),
                Extended::Infinite => Extended::Infinite,
            },
            q: self.q.as_ref().map(|q| match q {
                Extended::Finite(q) => Extended::Finite(q.to_f64()),
                Extended::Infinite => Extended::Infinite,
            }),
            gamma: self.gamma.to_f64(),
            d: self.d,
        }
    }
}

/// `−d < γ < d(p−1)`, the power-weight `A_p` condition. Undefined for `p = ∞`.
pub fn in_ap_range<S: Scalar>(p: &Extended<S>, gamma: &S, d: u32) -> Result<bool> {
    let Extended::Finite(p) = p else {
        return range("A_p membership is not defined for p = inf");
    };
    if *p <= S::one() {
        return range(format!("A_p membership requires p > 1, got {p}"));
    }
    let d = S::from_int(i64::from(d));
    Ok(*gamma > -d.clone() && *gamma < d * (p.clone() - S::one()))
}

impl<S: Scalar> fmt::Display for SpaceSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Holder => write!(f, "BUC^{}(d={})", self.s, self.d),
            Family::Besov | Family::TriebelLizorkin => write!(
                f,
                "{}^{}_{{{},{}}}(|x|^{}, d={})",
                self.family.code(),
                self.s,
                self.p,
                self.q_or_inf(),
                self.gamma,
                self.d
            ),
            _ => write!(
                f,
                "{}^{{{},{}}}(|x|^{}, d={})",
                self.family.code(),
                self.s,
                self.p,
                self.gamma,
                self.d
            ),
        }
    }
}

/// Parse an exact rational from `"3/4"`, `"-2"`, `"0.75"` or `"1e-4"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let scale = exp - i32::try_from(frac_part.len()).map_err(|_| bad())?;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(numer);
    let factor = num_traits::pow::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Ok(if neg { -value } else { value })
}

fn value_to_ratio(v: &Value, field: &str) -> Result<BigRational> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        _ => Err(Error::Parse(format!("field {field:?} must be a number or \"a/b\""))),
    }
}

fn value_to_extended<S: Scalar>(v: &Value, field: &str) -> Result<Extended<S>> {
    if let Value::String(s) = v {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" || t == "∞" {
            return Ok(Extended::Infinite);
        }
    }
    Ok(Extended::Finite(S::from_ratio(&value_to_ratio(v, field)?)))
}

fn ratio_to_value(r: &BigRational) -> Value {
    if r.is_integer() {
        if let Ok(n) = i64::try_from(r.to_integer()) {
            return Value::from(n);
        }
    }
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

/// Scalars that can be written back into a JSON descriptor.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
}

impl JsonScalar for BigRational {
    fn to_json(&self) -> Value {
        ratio_to_value(self)
    }
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        if self.is_finite() && self.fract() == 0.0 && self.abs() < 1e15 {
            Value::from(*self as i64)
        } else {
            Value::from(*self)
        }
    }
}

fn extended_to_value<S: JsonScalar>(x: &Extended<S>) -> Value {
    match x {
        Extended::Finite(v) => v.to_json(),
        Extended::Infinite => Value::String("inf".into()),
    }
}

impl<S: JsonScalar> Serialize for Extended<S> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        extended_to_value(self).serialize(ser)
    }
}

/// Accepts numbers, `"a/b"` strings and `"inf"`.
impl<'de, S: JsonScalar> Deserialize<'de> for Extended<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(de)?;
        value_to_extended(&v, "value").map_err(serde::de::Error::custom)
    }
}

/// Parse a JSON number or `"a/b"` string as an `f64`.
pub fn json_to_f64(v: &Value) -> Result<f64> {
    Ok(f64::from_ratio(&value_to_ratio(v, "value")?))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Descriptor {
    family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<Value>,
    dim: u32,
}

impl<S: JsonScalar> SpaceSpec<S> {
    /// Build from a JSON descriptor (not yet validated).
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let desc: Descriptor = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("bad space descriptor: {e}")))?;
        let scalar = |v: &Option<Value>, field: &str, default: Option<S>| -> Result<S> {
            match (v, default) {
                (Some(v), _) => Ok(S::from_ratio(&value_to_ratio(v, field)?)),
                (None, Some(d)) => Ok(d),
                (None, None) => Err(Error::Parse(format!("missing field {field:?}"))),
            }
        };
        let family = desc.family;
        let s = match family {
            Family::Lebesgue => scalar(&desc.s, "s", Some(S::zero()))?,
            _ => scalar(&desc.s, "s", None)?,
        };
        if family == Family::Holder {
            if desc.p.is_some() || desc.q.is_some() || desc.gamma.is_some() {
                return range("Holder space takes no p, q or gamma");
            }
            return Ok(SpaceSpec::holder(s, desc.dim));
        }
        let p = match &desc.p {
            Some(v) => value_to_extended(v, "p")?,
            None => return Err(Error::Parse("missing field \"p\"".into())),
        };
        let q = desc.q.as_ref().map(|v| value_to_extended(v, "q")).transpose()?;
        let gamma = scalar(&desc.gamma, "gamma", Some(S::zero()))?;
        Ok(SpaceSpec::new(family, s, p, q, gamma, desc.dim))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))?;
        Self::from_json_value(&v)
    }

    /// Parse and validate in one step.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_json_str(text)?.validate()
    }

    pub fn to_json_value(&self) -> Value {
        let holder = self.family == Family::Holder;
        let desc = Descriptor {
            family: self.family,
            s: Some(self.s.to_json()),
            p: (!holder).then(|| extended_to_value(&self.p)),
            q: self.q.as_ref().map(extended_to_value),
            gamma: (!holder).then(|| self.gamma.to_json()),
            dim: self.d,
        };
        serde_json::to_value(desc).expect("descriptor serializes")
    }
}

impl<S: JsonScalar> Serialize for SpaceSpec<S> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.to_json_value().serialize(ser)
    }
}

impl<'de, S: JsonScalar> Deserialize<'de> for SpaceSpec<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(de)?;
        SpaceSpec::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

/// Shorthand for an exact rational `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for a finite exact `Extended` value `n/d`.
pub fn ext(n: i64, d: i64) -> Extended<BigRational> {
    Extended::Finite(rat(n, d))
}

pub(crate) fn is_one<S: Scalar>(x: &Extended<S>) -> bool {
    matches!(x, Extended::Finite(v) if v.is_one())
}
