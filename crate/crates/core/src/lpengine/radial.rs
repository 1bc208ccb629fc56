//! Radial profiles and their weighted norms in polar coordinates.

use serde::{Deserialize, Serialize};

use super::quad::sphere_area;
use crate::error::{range, Result};

/// Shape of a radial profile `r ↦ g(r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialForm {
    /// `r^{−a} · log(1/r)^{−b}` on `(ε, r0]`.
    PowerLog { a: f64, b: f64, r0: f64 },
    /// Samples on an increasing radial mesh, linearly interpolated in `log r`.
    Tabulated { r: Vec<f64>, value: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub d: u32,
    pub form: RadialForm,
    pub inner_cutoff: f64,
}

/// Outcome of a polar-coordinate norm evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RadialNorm {
    Finite { value: f64 },
    Diverged,
}

impl RadialNorm {
    pub fn finite(&self) -> Option<f64> {
        match self {
            RadialNorm::Finite { value } => Some(*value),
            RadialNorm::Diverged => None,
        }
    }
    pub fn is_diverged(&self) -> bool {
        matches!(self, RadialNorm::Diverged)
    }
}

/// Cutoffs `ε = 2^{−m}` used by the divergence protocol.
pub const PROTOCOL_LEVELS: std::ops::RangeInclusive<i32> = 4..=20;
/// Minimum increment per refinement that counts as growth.
pub const PROTOCOL_DELTA: f64 = 0.1;
/// Cauchy tolerance of the protocol.
pub const PROTOCOL_CAUCHY: f64 = 1e-3;

impl RadialProfile {
    pub fn power_log(d: u32, a: f64, b: f64, r0: f64, eps: f64) -> Result<Self> {
        if d == 0 {
            return range("dimension must be at least 1");
        }
        if !(r0 > 0.0) || (b != 0.0 && r0 >= 1.0) {
            return range(format!("outer radius must be in (0, 1) for a log factor, got {r0}"));
        }
        if !(eps >= 0.0 && eps < r0) {
            return range(format!("inner cutoff must be in [0, r0), got {eps}"));
        }
        Ok(RadialProfile { d, form: RadialForm::PowerLog { a, b, r0 }, inner_cutoff: eps })
    }

    pub fn tabulated(d: u32, r: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        if r.len() != value.len() || r.len() < 2 {
            return range("tabulated profile needs at least two (r, value) pairs of equal length");
        }
        if r[0] <= 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return range("radial mesh must be positive and strictly increasing");
        }
        let eps = r[0];
        Ok(RadialProfile { d, form: RadialForm::Tabulated { r, value }, inner_cutoff: eps })
    }

    pub fn with_cutoff(&self, eps: f64) -> Self {
        RadialProfile { inner_cutoff: eps, ..self.clone() }
    }

    pub fn outer(&self) -> f64 {
        match &self.form {
            RadialForm::PowerLog { r0, .. } => *r0,
            RadialForm::Tabulated { r, .. } => *r.last().expect("non-empty"),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.inner_cutoff || r > self.outer() {
            return 0.0;
        }
        match &self.form {
            RadialForm::PowerLog { a, b, .. } => {
                let base = r.powf(-a);
                if *b == 0.0 {
                    base
                } else {
                    base * (1.0 / r).ln().powf(-b)
                }
            }
            RadialForm::Tabulated { r: rs, value } => {
                let pos = rs.partition_point(|&x| x < r);
                if pos == 0 {
                    return value[0];
                }
                let (r0, r1) = (rs[pos - 1], rs[pos]);
                let t = (r.ln() - r0.ln()) / (r1.ln() - r0.ln());
                value[pos - 1] + t * (value[pos] - value[pos - 1])
            }
        }
    }

    /// `∫ |g|^p r^{d−1+γ} dr` over `u = ln(1/r) ∈ [u0, u1]`, integrand in `u`.
    fn integrand(&self, p: f64, gamma: f64) -> impl Fn(f64) -> f64 + '_ {
        let e = f64::from(self.d) + gamma;
        move |u: f64| match &self.form {
            // stay in log space: r^{−ap+e} log^{−bp}; limits are set by the caller
            RadialForm::PowerLog { a, b, .. } => {
                let mut lg = -u * (e - a * p);
                if *b != 0.0 {
                    lg -= b * p * u.ln();
                }
                lg.exp()
            }
            RadialForm::Tabulated { .. } => {
                let r = (-u).exp();
                self.eval(r).abs().powf(p) * (-u * e).exp()
            }
        }
    }

    /// `σ_{d−1} ∫_{eps}^{r0} |g|^p r^{d−1+γ} dr` (no `1/p` power).
    pub fn truncated_integral(&self, p: f64, gamma: f64, eps: f64) -> f64 {
        let u0 = (1.0 / self.outer()).ln();
        let u1 = (1.0 / eps.max(self.inner_cutoff)).ln();
        if !(u1 > u0) {
            return 0.0;
        }
        let f = self.integrand(p, gamma);
        // unit panels in u, i.e. e-adic panels in r
        let mut total = 0.0;
        let mut a = u0;
        while a < u1 {
            let b = (a + 1.0).min(u1);
            total += adaptive_gk(&f, a, b, 1e-13, 40);
            a = b;
        }
        sphere_area(self.d) * total
    }

    /// Integral over the whole support `(0, r0]` in `u`, panels doubling in length.
    fn full_integral(&self, p: f64, gamma: f64) -> f64 {
        let f = self.integrand(p, gamma);
        let mut a = (1.0 / self.outer()).ln();
        let mut total = 0.0;
        let mut width = 1.0f64;
        for _ in 0..400 {
            let b = a + width;
            let part = adaptive_gk(&f, a, b, 1e-13, 40);
            total += part;
            a = b;
            if !total.is_finite() || (part <= 1e-16 * total && width > 64.0) {
                break;
            }
            width *= 2.0;
        }
        // algebraic tail of a critical power-log profile: ∫_a^∞ u^{−β} du
        if let RadialForm::PowerLog { a: pa, b, .. } = &self.form {
            let e = f64::from(self.d) + gamma;
            let beta = b * p;
            if (e - pa * p).abs() < 1e-14 && beta > 1.0 {
                total += a.powf(1.0 - beta) / (beta - 1.0);
            }
        }
        sphere_area(self.d) * total
    }

    /// The sequence of truncated integrals at `ε = 2^{−m}` used by the protocol.
    pub fn protocol_sequence(&self, p: f64, gamma: f64) -> Vec<(f64, f64)> {
        PROTOCOL_LEVELS
            .map(|m| {
                let eps = (-f64::from(m)).exp2();
                (eps, self.truncated_integral(p, gamma, eps))
            })
            .collect()
    }
}

/// Divergence classification of a sequence of truncated integrals.
///
/// Diverged when each of the last two refinements adds more than
/// [`PROTOCOL_DELTA`] and the last step is not Cauchy at [`PROTOCOL_CAUCHY`].
pub fn classify_diverged(values: &[f64]) -> bool {
    let n = values.len();
    if n < 3 {
        return false;
    }
    if values.iter().any(|v| !v.is_finite()) {
        return true;
    }
    let d1 = values[n - 2] - values[n - 3];
    let d2 = values[n - 1] - values[n - 2];
    let cauchy = d2.abs() <= PROTOCOL_CAUCHY * values[n - 1].abs().max(1.0);
    d1 > PROTOCOL_DELTA && d2 > PROTOCOL_DELTA && !cauchy
}

/// `‖g‖_{L^p(|x|^γ)}` of a radial function in polar coordinates.
///
/// With a positive inner cutoff the truncated integral is returned. With
/// cutoff 0 the divergence protocol runs first; a finite result integrates
/// all the way to the origin.
pub fn radial_weighted_lp(prof: &RadialProfile, p: f64, gamma: f64) -> Result<RadialNorm> {
    if !(p >= 1.0) || !p.is_finite() {
        return range(format!("p must be in [1, inf), got {p}"));
    }
    if !(gamma > -f64::from(prof.d)) {
        return range(format!("weight exponent must exceed -d, got {gamma}"));
    }
    if prof.inner_cutoff > 0.0 {
        let v = prof.truncated_integral(p, gamma, prof.inner_cutoff);
        return Ok(RadialNorm::Finite { value: v.powf(1.0 / p) });
    }
    let seq: Vec<f64> = prof.protocol_sequence(p, gamma).into_iter().map(|(_, v)| v).collect();
    if classify_diverged(&seq) {
        return Ok(RadialNorm::Diverged);
    }
    let v = prof.full_integral(p, gamma);
    if !v.is_finite() {
        return Ok(RadialNorm::Diverged);
    }
    Ok(RadialNorm::Finite { value: v.powf(1.0 / p) })
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_64,
    0.949_107_912_342_758_52,
    0.864_864_423_359_769_07,
    0.741_531_185_599_394_44,
    0.586_087_235_467_691_13,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its embedded 7-point Gauss error estimate.
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = (a + b) / 2.0;
    let h = (b - a) / 2.0;
    let fc = f(c);
    let mut k = GK_WK[7] * fc;
    let mut g = GK_WG[3] * fc;
    for i in 0..7 {
        let x = h * GK_X[i];
        let s = f(c - x) + f(c + x);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection with GK15 to absolute-or-relative tolerance `tol`.
pub fn adaptive_gk(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (v, err) = gk15(f, a, b);
    if depth == 0 || err <= tol * v.abs().max(1e-300) || err < 1e-300 {
        return v;
    }
    let m = (a + b) / 2.0;
    adaptive_gk(f, a, m, tol, depth - 1) + adaptive_gk(f, m, b, tol, depth - 1)
}
