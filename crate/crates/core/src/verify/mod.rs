//! Experiments that connect oracle verdicts to numbers: exponent fits along
//! witness families, inequality checks, and failure demonstrations.

mod coherence;
mod experiments;
mod suite;

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::params::SpaceSpec;
use crate::witnesses::{Manifest, WitnessKind};

pub use coherence::{
    check_embedding, curated_pairs, demonstrate_failure, Bench, BenchConfig, CuratedPair, GROWTH_MARGIN,
    NO_GROWTH_FACTOR,
};
pub use experiments::{
    centered_gaussian, check_equivalences, check_gagliardo, check_lacunary, check_log_dichotomy, check_nikolskij,
    check_peak_scaling, check_translation_scaling, nikolskij_condition, Dilations, BOUNDED_FACTOR, RESIDUAL_CAP,
};
pub use suite::{config_hash, content_hash, run_experiment, run_suite, Experiment, GridSpec, RunConfig, SuiteOutcome};

/// Least-squares line through `(ln x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Fit `y ≈ slope · ln x + intercept`. Needs at least 4 points with `x`
/// strictly increasing and positive.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Result<ExponentFit> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateData(format!("{} abscissae but {} ordinates", xs.len(), ys.len())));
    }
    if xs.len() < 4 {
        return Err(Error::DegenerateData(format!("need at least 4 points, got {}", xs.len())));
    }
    if xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateData("abscissae must be positive and strictly increasing".into()));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::DegenerateData("non-finite ordinate".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = lx.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).abs()).fold(0.0, f64::max);
    Ok(ExponentFit { xs: xs.to_vec(), ys: ys.to_vec(), slope, intercept, max_residual })
}

/// How an experiment decides pass/fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PassRule {
    /// `|slope − predicted| ≤ tolerance` and `max_residual ≤ residual_cap`.
    Slope { predicted: f64, tolerance: f64, residual_cap: f64 },
    /// Normalized ratios `ratio / x^exponent` vary by at most `factor`, and
    /// `slope ≤ exponent + tolerance`.
    Bounded { exponent: f64, tolerance: f64, factor: f64 },
    /// Every ratio lies in `[lo, hi]`.
    Window { lo: f64, hi: f64 },
    /// Every ratio is at most `cap`.
    Cap { cap: f64 },
    /// `slope > margin`: the ratio grows without bound along the family.
    Growth { predicted: f64, margin: f64 },
    /// No ratio exceeds `factor` times the first one.
    NoGrowth { factor: f64 },
    /// Source norm converges, target norm is classified as diverged.
    Divergence,
    /// Nothing to check: the oracle has no verdict, the pair is only listed.
    Listed,
}

/// One member of an experiment: family parameter and the two norms compared.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub parameter: f64,
    pub src_norm: Option<f64>,
    pub tgt_norm: Option<f64>,
    pub ratio: Option<f64>,
}

impl ReportRow {
    pub fn new(parameter: f64, src: f64, tgt: f64) -> Self {
        ReportRow { parameter, src_norm: Some(src), tgt_norm: Some(tgt), ratio: Some(tgt / src) }
    }
    pub fn single(parameter: f64, value: f64) -> Self {
        ReportRow { parameter, src_norm: None, tgt_norm: Some(value), ratio: Some(value) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<Manifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<SpaceSpec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<SpaceSpec<f64>>,
    pub parameters: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_exponent: Option<f64>,
    /// Where the prediction comes from.
    pub formula: String,
    pub rule: PassRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<ExponentFit>,
    pub rows: Vec<ReportRow>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub(crate) fn new(id: impl Into<String>, rule: PassRule, formula: impl Into<String>) -> Self {
        ExperimentReport {
            id: id.into(),
            witness: None,
            manifest: None,
            source: None,
            target: None,
            parameters: Value::Null,
            predicted_exponent: match &rule {
                PassRule::Slope { predicted, .. } | PassRule::Growth { predicted, .. } => Some(*predicted),
                PassRule::Bounded { exponent, .. } => Some(*exponent),
                _ => None,
            },
            formula: formula.into(),
            rule,
            fit: None,
            rows: Vec::new(),
            pass: false,
            seed: None,
            notes: Vec::new(),
        }
    }

    /// Tolerance of the pass rule (slope tolerance, margin, cap or factor).
    pub fn tolerance(&self) -> f64 {
        match &self.rule {
            PassRule::Slope { tolerance, .. } | PassRule::Bounded { tolerance, .. } => *tolerance,
            PassRule::Growth { margin, .. } => *margin,
            PassRule::Cap { cap } => *cap,
            PassRule::NoGrowth { factor } => *factor,
            PassRule::Window { hi, .. } => *hi,
            PassRule::Divergence | PassRule::Listed => 0.0,
        }
    }

    fn ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.ratio).collect()
    }

    /// Apply the pass rule to the recorded fit and rows.
    pub(crate) fn evaluate(mut self) -> Self {
        let ratios = self.ratios();
        let finite = !ratios.is_empty() && ratios.iter().all(|r| r.is_finite() && *r > 0.0);
        self.pass = match (&self.rule, &self.fit) {
            (PassRule::Slope { predicted, tolerance, residual_cap }, Some(fit)) => {
                (fit.slope - predicted).abs() <= *tolerance && fit.max_residual <= *residual_cap
            }
            (PassRule::Bounded { exponent, tolerance, factor }, Some(fit)) => {
                let norm: Vec<f64> = self
                    .rows
                    .iter()
                    .filter_map(|r| r.ratio.map(|v| v / r.parameter.powf(*exponent)))
                    .collect();
                let hi = norm.iter().cloned().fold(f64::MIN, f64::max);
                let lo = norm.iter().cloned().fold(f64::MAX, f64::min);
                finite && hi / lo <= *factor && fit.slope <= exponent + tolerance
            }
            (PassRule::Window { lo, hi }, _) => finite && ratios.iter().all(|r| r >= lo && r <= hi),
            (PassRule::Cap { cap }, _) => finite && ratios.iter().all(|r| r <= cap),
            (PassRule::Growth { margin, .. }, Some(fit)) => fit.slope > *margin,
            (PassRule::NoGrowth { factor }, _) => finite && ratios.iter().all(|r| *r <= factor * ratios[0]),
            (PassRule::Divergence, _) => self.pass,
            (PassRule::Listed, _) => true,
            _ => false,
        };
        self
    }

    /// Flat CSV, one row per family member.
    pub fn to_csv(&self, config_hash: &str) -> String {
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        let mut out = format!("# config_hash={config_hash}\nparameter,src_norm,tgt_norm,ratio\n");
        for r in &self.rows {
            let _ = writeln!(out, "{:.17e},{},{},{}", r.parameter, cell(r.src_norm), cell(r.tgt_norm), cell(r.ratio));
        }
        out
    }

    /// Write `<id>.json` and `<id>.csv` into `dir`.
    pub fn write(&self, dir: &Path, config_hash: &str) -> Result<()> {
        fs::create_dir_all(dir)?;
        #[derive(Serialize)]
        struct Stamped<'a> {
            config_hash: &'a str,
            #[serde(flatten)]
            report: &'a ExperimentReport,
        }
        let mut json = serde_json::to_string_pretty(&Stamped { config_hash, report: self })?;
        json.push('\n');
        fs::write(dir.join(format!("{}.json", self.id)), json)?;
        let mut csv = fs::File::create(dir.join(format!("{}.csv", self.id)))?;
        csv.write_all(self.to_csv(config_hash).as_bytes())?;
        Ok(())
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let detail = match (&self.rule, &self.fit) {
            (PassRule::Slope { predicted, tolerance, .. }, Some(fit)) => format!(
                "slope {:.4} vs {:.4} (tol {tolerance}), max residual {:.2e}",
                fit.slope, predicted, fit.max_residual
            ),
            (PassRule::Growth { predicted, margin }, Some(fit)) => {
                format!("slope {:.4} > {margin} (predicted {predicted:.4})", fit.slope)
            }
            (PassRule::Bounded { exponent, factor, .. }, Some(fit)) => {
                format!("slope {:.4} <= {exponent:.4}, normalized spread within {factor}", fit.slope)
            }
            (PassRule::Divergence, _) => "source finite, target diverged".to_string(),
            (PassRule::Listed, _) => "verdict unknown, listed without a check".to_string(),
            _ => {
                let r = self.ratios();
                let hi = r.iter().cloned().fold(f64::MIN, f64::max);
                let lo = r.iter().cloned().fold(f64::MAX, f64::min);
                format!("ratios in [{lo:.4}, {hi:.4}]")
            }
        };
        format!("{status} {}: {detail}", self.id)
    }
}

#[cfg(test)]
mod tests;
