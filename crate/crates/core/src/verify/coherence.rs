use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::experiments::{centered_gaussian, divergence_report, lacunary_rows, Dilations};
use super::{fit_exponent, ExperimentReport, PassRule, ReportRow};
use crate::error::{Error, Result};
use crate::lpengine::{make_dyadic, DyadicSystem, Field, Grid};
use crate::norms::Analyzer;
use crate::oracle::{decide, Outcome, Violation};
use crate::params::{Family, JsonScalar, SpaceSpec};
use crate::scalar::Scalar;
use crate::witnesses::{
    log_singularity, peak, random_band_limited, riesz_log, translation_family, Manifest, WitnessKind,
};
use crate::Spec;

/// Fitted growth slope that counts as "grows without bound".
pub const GROWTH_MARGIN: f64 = 0.05;
/// Largest allowed ratio relative to the first family member for embeddings.
pub const NO_GROWTH_FACTOR: f64 = 10.0;

/// Grids and family ranges used to exercise verdicts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub d: u32,
    /// `(L, N)` of the spectral-peak grid and the peak indices `n`.
    pub peak_grid: (f64, usize),
    pub peak_n: Vec<u32>,
    /// Translation grid, band of the centered Gaussian base and shifts `λ`.
    pub shift_grid: (f64, usize),
    pub shift_band: f64,
    pub lambdas: Vec<f64>,
    /// Dilation grid, band of the random base, seed and parameters `t ≤ 1`.
    pub dilation_grid: (f64, usize),
    pub dilation_band: f64,
    pub dilation_seed: u64,
    pub ts: Vec<f64>,
    /// Grid carrying the reference peaks of the lacunary sums and the term counts.
    pub lacunary_grid: (f64, usize),
    pub lacunary_n: Vec<u32>,
}

fn geometric(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * ratio.powi(i as i32)).collect()
}

impl BenchConfig {
    pub fn default_for(d: u32) -> Self {
        let half = std::f64::consts::SQRT_2;
        if d == 1 {
            BenchConfig {
                d,
                peak_grid: (16.0, 1 << 13),
                peak_n: (3..=7).collect(),
                shift_grid: (128.0, 1 << 12),
                shift_band: 8.0,
                lambdas: geometric(4.0, half, 9),
                dilation_grid: (1024.0, 1 << 13),
                dilation_band: 2.0,
                dilation_seed: 11,
                ts: geometric(1.0, 1.0 / half, 9),
                lacunary_grid: (16.0, 1 << 12),
                lacunary_n: vec![4, 6, 8, 12, 16, 24, 32],
            }
        } else {
            BenchConfig {
                d,
                peak_grid: (8.0, 1 << 9),
                peak_n: (2..=5).collect(),
                shift_grid: (32.0, 1 << 8),
                shift_band: 8.0,
                lambdas: geometric(2.0, half, 7),
                dilation_grid: (128.0, 1 << 8),
                dilation_band: 2.0,
                dilation_seed: 11,
                ts: geometric(1.0, 1.0 / half, 5),
                lacunary_grid: (4.0, 1 << 9),
                lacunary_n: vec![4, 6, 8, 12, 16],
            }
        }
    }
}

/// Materialized witness families shared by every pair of one dimension.
#[derive(Debug)]
pub struct Bench {
    pub config: BenchConfig,
    peak_an: Analyzer<f64>,
    peaks: Vec<Field<f64>>,
    shift_an: Analyzer<f64>,
    shifts: Vec<Field<f64>>,
    shift_manifest: Manifest,
    dilation_an: Analyzer<f64>,
    dilations: Dilations<f64>,
    lacunary_sys: DyadicSystem<f64>,
}

impl Bench {
    pub fn new(config: BenchConfig) -> Result<Self> {
        let d = config.d;
        let pg = Grid::new(d, config.peak_grid.0, config.peak_grid.1)?;
        let peak_sys = make_dyadic(&pg);
        let peaks = config.peak_n.par_iter().map(|&n| peak(&peak_sys, n, 0)).collect::<Result<_>>()?;
        let sg = Grid::new(d, config.shift_grid.0, config.shift_grid.1)?;
        let base = centered_gaussian(&sg, config.shift_band)?;
        let fam = translation_family(&base, &config.lambdas)?;
        let shifts = fam.members()?.into_iter().map(|m| m.field().cloned().expect("field")).collect();
        let dg = Grid::new(d, config.dilation_grid.0, config.dilation_grid.1)?;
        let dbase = random_band_limited(&dg, config.dilation_band, config.dilation_seed)?;
        let dilations = Dilations::new(&dbase, &config.ts)?;
        let lg = Grid::new(d, config.lacunary_grid.0, config.lacunary_grid.1)?;
        Ok(Bench {
            peak_an: Analyzer::from_system(peak_sys),
            peaks,
            shift_an: Analyzer::new(&sg),
            shifts,
            shift_manifest: fam.manifest(None),
            dilation_an: Analyzer::new(&dg),
            dilations,
            lacunary_sys: make_dyadic(&lg),
            config,
        })
    }

    fn ratio_rows(
        an: &Analyzer<f64>,
        members: &[Field<f64>],
        params: &[f64],
        src: &SpaceSpec<f64>,
        tgt: &SpaceSpec<f64>,
    ) -> Result<Vec<ReportRow>> {
        members
            .par_iter()
            .zip(params)
            .map(|(f, &x)| Ok(ReportRow::new(x, an.space_norm(f, src)?.value, an.space_norm(f, tgt)?.value)))
            .collect()
    }

    /// Rows and fit abscissae of one family, ordered so the witness parameter increases.
    fn family(&self, kind: WitnessKind, src: &SpaceSpec<f64>, tgt: &SpaceSpec<f64>) -> Result<(Vec<ReportRow>, Vec<f64>)> {
        let c = &self.config;
        match kind {
            WitnessKind::SpectralPeak => {
                let ns: Vec<f64> = c.peak_n.iter().map(|&n| f64::from(n)).collect();
                let rows = Self::ratio_rows(&self.peak_an, &self.peaks, &ns, src, tgt)?;
                Ok((rows, ns.iter().map(|n| n.exp2()).collect()))
            }
            WitnessKind::Translation => {
                let rows = Self::ratio_rows(&self.shift_an, &self.shifts, &c.lambdas, src, tgt)?;
                Ok((rows, c.lambdas.clone()))
            }
            WitnessKind::Dilation => {
                let rows = Self::ratio_rows(&self.dilation_an, &self.dilations.members, &c.ts, src, tgt)?;
                Ok((rows, c.ts.iter().map(|t| 1.0 / t).collect()))
            }
            WitnessKind::LacunarySum => {
                let rows = lacunary_rows(&self.lacunary_sys, src, tgt, &c.lacunary_n)?;
                Ok((rows, c.lacunary_n.iter().map(|&n| f64::from(n)).collect()))
            }
            _ => Err(Error::NotApplicable(format!("{} is not a field family", kind.code()))),
        }
    }

    fn manifest(&self, kind: WitnessKind) -> Option<Manifest> {
        match kind {
            WitnessKind::Translation => Some(self.shift_manifest.clone()),
            WitnessKind::Dilation => Some(self.dilations.manifest.clone()),
            _ => None,
        }
    }

    fn family_report(
        &self,
        kind: WitnessKind,
        src: &SpaceSpec<f64>,
        tgt: &SpaceSpec<f64>,
        rule: PassRule,
        formula: &str,
    ) -> Result<ExperimentReport> {
        let (rows, xs) = self.family(kind, src, tgt)?;
        let mut rep = ExperimentReport::new(format!("{}_{}", rule_prefix(&rule), kind.code()), rule, formula);
        rep.witness = Some(kind);
        rep.manifest = self.manifest(kind);
        rep.source = Some(src.clone());
        rep.target = Some(tgt.clone());
        rep.parameters = json!({ "abscissa": abscissa(kind), "bench": self.config });
        let ys: Vec<f64> = rows.iter().map(|r| r.ratio.unwrap_or(f64::NAN).ln()).collect();
        rep.fit = Some(fit_exponent(&xs, &ys)?);
        rep.rows = rows;
        Ok(rep.evaluate())
    }
}

fn rule_prefix(rule: &PassRule) -> &'static str {
    match rule {
        PassRule::Growth { .. } | PassRule::Divergence => "failure",
        _ => "bounded",
    }
}

fn abscissa(kind: WitnessKind) -> &'static str {
    match kind {
        WitnessKind::SpectralPeak => "2^n",
        WitnessKind::Translation => "lambda",
        WitnessKind::Dilation => "1/t",
        WitnessKind::LacunarySum => "N",
        _ => "eps",
    }
}

fn checked<S: Scalar + JsonScalar>(src: &SpaceSpec<S>, tgt: &SpaceSpec<S>) -> Result<(crate::Verdict, SpaceSpec<f64>, SpaceSpec<f64>)> {
    let verdict = decide(src, tgt)?;
    let s = src.validate()?.to_f64();
    let t = tgt.validate()?.to_f64();
    Ok((verdict, s, t))
}

/// Run the witness family matching the first violated condition of a
/// `DoesNotEmbed` verdict and check that the norm ratio blows up.
pub fn demonstrate_failure<S: Scalar + JsonScalar>(
    bench: &Bench,
    src: &SpaceSpec<S>,
    tgt: &SpaceSpec<S>,
) -> Result<ExperimentReport> {
    let (verdict, s, t) = checked(src, tgt)?;
    if verdict.outcome != Outcome::DoesNotEmbed {
        return Err(Error::NotApplicable(format!("verdict for {src} -> {tgt} is {:?}", verdict.outcome)));
    }
    if s.d != bench.config.d {
        return Err(Error::DimensionMismatch(s.d, bench.config.d));
    }
    let violation = verdict.violation.expect("negative verdicts carry a violation");
    let (i0, i1) = (s.indices(), t.indices());
    let growth = |predicted: f64| PassRule::Growth { predicted, margin: GROWTH_MARGIN };
    let mut rep = match violation {
        Violation::Smoothness => bench.family_report(
            WitnessKind::SpectralPeak,
            &s,
            &t,
            growth(i1.shifted_smoothness - i0.shifted_smoothness),
            "(s1 - s0) + (d+gamma0)/p0 - (d+gamma1)/p1 per unit of n ln 2",
        )?,
        Violation::WeightIndex => bench.family_report(
            WitnessKind::Translation,
            &s,
            &t,
            growth(i1.weight_index - i0.weight_index),
            "gamma1/p1 - gamma0/p0 per unit of ln lambda",
        )?,
        Violation::DimIndex => bench.family_report(
            WitnessKind::Dilation,
            &s,
            &t,
            growth(i1.dim_index - i0.dim_index),
            "(d+gamma1)/p1 - (d+gamma0)/p0 per unit of ln(1/t)",
        )?,
        Violation::Microscopic => bench.family_report(
            WitnessKind::LacunarySum,
            &s,
            &t,
            growth(t.q_or_inf().reciprocal() - s.q_or_inf().reciprocal()),
            "1/q1 - 1/q0 per unit of ln N",
        )?,
        Violation::DimStrict => {
            let (p0, p1) = (s.p.to_f64(), t.p.to_f64());
            let prof = log_singularity(p0, s.gamma, p1, s.d, 0.0)?;
            let mut rep = divergence_report("failure_logsing", &prof, (p0, s.gamma), &prof, (p1, t.gamma))?;
            rep.witness = Some(WitnessKind::LogSingularity);
            rep
        }
        Violation::SharpLine => {
            let (p0, p1) = (s.p.to_f64(), t.p.to_f64());
            let a = i0.dim_index;
            let src_prof = riesz_log(a, 1.0 / p1, s.d, 0.0)?;
            // the Riesz potential of order s0 − s1 lowers the singularity by s0 − s1
            let tgt_prof = riesz_log(a - (s.s - t.s), 1.0 / p1, s.d, 0.0)?;
            let mut rep = divergence_report("failure_rieszlog", &src_prof, (p0, s.gamma), &tgt_prof, (p1, t.gamma))?;
            rep.witness = Some(WitnessKind::RieszLog);
            rep.notes.push("target profile is the singular part of the Riesz potential of the source profile".into());
            rep
        }
    };
    rep.source = Some(s);
    rep.target = Some(t);
    rep.notes.push(format!("violation: {violation:?}; deciding rule: {:?}", verdict.deciding_rule()));
    Ok(rep)
}

/// For an `Embeds` verdict: the norm ratio never grows beyond
/// [`NO_GROWTH_FACTOR`] along peaks, translations, dilations and, for Besov
/// pairs on the sharp line, lacunary sums.
pub fn check_embedding<S: Scalar + JsonScalar>(
    bench: &Bench,
    src: &SpaceSpec<S>,
    tgt: &SpaceSpec<S>,
) -> Result<Vec<ExperimentReport>> {
    let (verdict, s, t) = checked(src, tgt)?;
    if verdict.outcome != Outcome::Embeds {
        return Err(Error::NotApplicable(format!("verdict for {src} -> {tgt} is {:?}", verdict.outcome)));
    }
    if s.d != bench.config.d {
        return Err(Error::DimensionMismatch(s.d, bench.config.d));
    }
    let mut kinds = vec![WitnessKind::SpectralPeak, WitnessKind::Translation, WitnessKind::Dilation];
    let sharp = (s.indices().shifted_smoothness - t.indices().shifted_smoothness).abs() <= 1e-12;
    if s.family == Family::Besov && t.family == Family::Besov && sharp {
        kinds.push(WitnessKind::LacunarySum);
    }
    kinds
        .into_iter()
        .map(|k| {
            bench.family_report(k, &s, &t, PassRule::NoGrowth { factor: NO_GROWTH_FACTOR }, "bounded: |f|_tgt <= C |f|_src")
        })
        .collect()
}

/// A labelled `(source, target)` pair.
#[derive(Clone, Debug)]
pub struct CuratedPair {
    pub label: &'static str,
    pub src: Spec,
    pub tgt: Spec,
}

/// Twenty one-dimensional pairs whose verdicts together cite every rule.
pub fn curated_pairs() -> Vec<CuratedPair> {
    let table: [(&str, &str, &str); 20] = [
        ("besov_subcritical", r#"{"family":"B","s":1,"p":2,"q":1,"gamma":0,"dim":1}"#, r#"{"family":"B","s":0,"p":4,"q":1,"gamma":0,"dim":1}"#),
        ("besov_identity", r#"{"family":"B","s":"1/3","p":"5/2","q":3,"gamma":"-1/2","dim":1}"#, r#"{"family":"B","s":"1/3","p":"5/2","q":3,"gamma":"-1/2","dim":1}"#),
        ("besov_sharp_q_ok", r#"{"family":"B","s":1,"p":2,"q":1,"gamma":0,"dim":1}"#, r#"{"family":"B","s":"3/4","p":4,"q":2,"gamma":0,"dim":1}"#),
        ("besov_sharp_q_fails", r#"{"family":"B","s":1,"p":2,"q":2,"gamma":0,"dim":1}"#, r#"{"family":"B","s":"3/4","p":4,"q":1,"gamma":0,"dim":1}"#),
        ("besov_strict_dimension", r#"{"family":"B","s":1,"p":2,"q":1,"gamma":0,"dim":1}"#, r#"{"family":"B","s":0,"p":"3/2","q":"inf","gamma":"-1/4","dim":1}"#),
        ("besov_dimension_index", r#"{"family":"B","s":0,"p":4,"q":2,"gamma":0,"dim":1}"#, r#"{"family":"B","s":0,"p":2,"q":2,"gamma":0,"dim":1}"#),
        ("triebel_q_free", r#"{"family":"F","s":1,"p":2,"q":2,"gamma":0,"dim":1}"#, r#"{"family":"F","s":"1/2","p":4,"q":1,"gamma":0,"dim":1}"#),
        ("triebel_sharp_swap", r#"{"family":"F","s":"3/4","p":4,"q":2,"gamma":2,"dim":1}"#, r#"{"family":"F","s":"3/5","p":2,"q":2,"gamma":"1/5","dim":1}"#),
        ("triebel_sandwich", r#"{"family":"F","s":1,"p":4,"q":"inf","gamma":2,"dim":1}"#, r#"{"family":"F","s":"3/5","p":2,"q":1,"gamma":"1/5","dim":1}"#),
        ("triebel_open", r#"{"family":"F","s":"3/4","p":4,"q":1,"gamma":2,"dim":1}"#, r#"{"family":"F","s":"3/5","p":2,"q":2,"gamma":"1/5","dim":1}"#),
        ("bessel_characterized", r#"{"family":"H","s":1,"p":2,"gamma":"1/2","dim":1}"#, r#"{"family":"H","s":"4/5","p":3,"gamma":"3/4","dim":1}"#),
        ("bessel_sharp_swap", r#"{"family":"H","s":"3/4","p":4,"gamma":2,"dim":1}"#, r#"{"family":"H","s":"3/5","p":2,"gamma":"1/5","dim":1}"#),
        ("bessel_smoothness", r#"{"family":"H","s":0,"p":2,"gamma":3,"dim":1}"#, r#"{"family":"H","s":1,"p":2,"gamma":3,"dim":1}"#),
        ("sobolev_weight_index", r#"{"family":"W","s":1,"p":2,"gamma":0,"dim":1}"#, r#"{"family":"W","s":0,"p":2,"gamma":1,"dim":1}"#),
        ("sobolev_to_bessel", r#"{"family":"W","s":1,"p":2,"gamma":"1/2","dim":1}"#, r#"{"family":"H","s":0,"p":3,"gamma":"3/4","dim":1}"#),
        ("jawerth_franke_bf", r#"{"family":"B","s":1,"p":2,"q":4,"gamma":0,"dim":1}"#, r#"{"family":"F","s":"3/4","p":4,"q":1,"gamma":0,"dim":1}"#),
        ("jawerth_franke_fb", r#"{"family":"F","s":1,"p":2,"q":"inf","gamma":0,"dim":1}"#, r#"{"family":"B","s":"3/4","p":4,"q":2,"gamma":0,"dim":1}"#),
        ("holder_target", r#"{"family":"B","s":2,"p":2,"q":2,"gamma":0,"dim":1}"#, r#"{"family":"Holder","s":1,"dim":1}"#),
        ("besov_into_lebesgue", r#"{"family":"B","s":1,"p":2,"q":1,"gamma":0,"dim":1}"#, r#"{"family":"Lp","p":4,"gamma":0,"dim":1}"#),
        ("triebel_into_lebesgue", r#"{"family":"F","s":1,"p":2,"q":"inf","gamma":2,"dim":1}"#, r#"{"family":"Lp","p":2,"gamma":2,"dim":1}"#),
    ];
    table
        .iter()
        .map(|(label, a, b)| CuratedPair {
            label,
            src: Spec::from_json_str(a).expect("curated source parses"),
            tgt: Spec::from_json_str(b).expect("curated target parses"),
        })
        .collect()
}
