use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::coherence::{check_embedding, curated_pairs, demonstrate_failure, Bench, BenchConfig};
use super::experiments::{
    centered_gaussian, check_equivalences, check_gagliardo, check_lacunary, check_log_dichotomy, check_nikolskij,
    check_peak_scaling, check_translation_scaling, Dilations,
};
use super::ExperimentReport;
use crate::error::{Error, Result};
use crate::lpengine::{make_dyadic, Grid};
use crate::norms::Analyzer;
use crate::oracle::{decide, Outcome};
use crate::params::{json_to_f64, Extended};
use crate::witnesses::{random_band_limited, random_block_field};
use crate::Spec;

fn num<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
    json_to_f64(&Value::deserialize(de)?).map_err(serde::de::Error::custom)
}

fn nums<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<f64>, D::Error> {
    Vec::<Value>::deserialize(de)?
        .iter()
        .map(|v| json_to_f64(v).map_err(serde::de::Error::custom))
        .collect()
}

/// `(d, L, N)` of a periodic grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: u32,
    #[serde(rename = "L", deserialize_with = "num")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid<f64>> {
        Grid::new(self.d, self.l, self.n)
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { d: 1, l: 16.0, n: 1 << 14 }
    }
}

/// One selectable experiment. Omitted grids fall back to per-experiment defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Peak norms against `2^n`; uses the run grid unless overridden.
    PeakScaling {
        p: Extended<f64>,
        #[serde(deserialize_with = "num")]
        gamma: f64,
        j: i32,
        n: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<GridSpec>,
    },
    /// Translated Gaussian of the given band against `λ`.
    TranslationScaling {
        p: Extended<f64>,
        #[serde(deserialize_with = "num")]
        gamma: f64,
        #[serde(deserialize_with = "nums")]
        lambda: Vec<f64>,
        #[serde(default = "default_shift_band", deserialize_with = "num")]
        band: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<GridSpec>,
    },
    /// Two-weight Nikol'skij inequality over random unit-band bases.
    Nikolskij {
        p0: Extended<f64>,
        #[serde(deserialize_with = "num")]
        gamma0: f64,
        p1: Extended<f64>,
        #[serde(deserialize_with = "num")]
        gamma1: f64,
        alpha: Vec<u32>,
        #[serde(deserialize_with = "nums")]
        t: Vec<f64>,
        #[serde(default = "default_bases")]
        bases: u32,
        #[serde(default)]
        force: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<GridSpec>,
    },
    /// Interpolation inequality over random block fields.
    Gagliardo {
        #[serde(deserialize_with = "num")]
        s0: f64,
        #[serde(deserialize_with = "num")]
        s1: f64,
        #[serde(deserialize_with = "num")]
        theta: f64,
        p: Extended<f64>,
        q: Extended<f64>,
        #[serde(deserialize_with = "num")]
        gamma: f64,
        #[serde(default = "default_batch")]
        batch: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<GridSpec>,
    },
    /// Lifting, differentiation, sandwich and `W ≍ H` ratios over random block fields.
    Equivalences {
        #[serde(deserialize_with = "num")]
        gamma: f64,
        #[serde(default = "default_batch")]
        batch: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<GridSpec>,
    },
    /// Log-singular profile: convergent source, divergent target.
    LogDichotomy {
        d: u32,
        #[serde(deserialize_with = "num")]
        p0: f64,
        #[serde(deserialize_with = "num")]
        gamma0: f64,
        #[serde(deserialize_with = "num")]
        p1: f64,
        #[serde(deserialize_with = "num")]
        gamma1: f64,
    },
    /// Lacunary sums on the sharp line of two Besov spaces.
    Lacunary {
        src: Spec,
        tgt: Spec,
        n: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<GridSpec>,
    },
    /// Verdict–experiment coherence over explicit pairs, or the curated set when omitted.
    Coherence {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairs: Option<Vec<(Spec, Spec)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bench: Option<BenchConfig>,
    },
}

fn default_shift_band() -> f64 {
    8.0
}
fn default_bases() -> u32 {
    5
}
fn default_batch() -> usize {
    100
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::PeakScaling { .. } => "peak_scaling",
            Experiment::TranslationScaling { .. } => "translation_scaling",
            Experiment::Nikolskij { .. } => "nikolskij",
            Experiment::Gagliardo { .. } => "gagliardo",
            Experiment::Equivalences { .. } => "equivalences",
            Experiment::LogDichotomy { .. } => "log_dichotomy",
            Experiment::Lacunary { .. } => "lacunary",
            Experiment::Coherence { .. } => "coherence",
        }
    }

    /// One-line description for `--list`.
    pub fn describe(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|_| self.kind().to_string())
    }
}

/// A complete, serializable experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    pub experiments: Vec<Experiment>,
}

impl RunConfig {
    /// The acceptance-level suite at desk scale.
    pub fn default_suite() -> Self {
        let p = |v: f64| Extended::Finite(v);
        let params = [(2.0, 0.0), (2.0, 0.5), (4.0, 1.0), (1.5, -1.0 / 3.0)];
        let mut experiments = Vec::new();
        for &(pp, g) in &params {
            for j in [-1, 0, 1] {
                experiments.push(Experiment::PeakScaling { p: p(pp), gamma: g, j, n: (3..=7).collect(), grid: None });
            }
        }
        for g in [-0.5, 0.0, 1.0, 2.0] {
            for pp in [2.0, 4.0] {
                experiments.push(Experiment::TranslationScaling {
                    p: p(pp),
                    gamma: g,
                    lambda: (0..9).map(|i| 4.0 * 2f64.powf(f64::from(i) / 2.0)).collect(),
                    band: default_shift_band(),
                    grid: None,
                });
            }
        }
        for &(a, b) in &[(0usize, 3usize), (1, 0), (1, 2), (1, 3), (2, 3)] {
            for alpha in [0u32, 1] {
                experiments.push(Experiment::Nikolskij {
                    p0: p(params[a].0),
                    gamma0: params[a].1,
                    p1: p(params[b].0),
                    gamma1: params[b].1,
                    alpha: vec![alpha],
                    t: (0..9).map(|i| 2f64.powf(f64::from(i) / 2.0)).collect(),
                    bases: default_bases(),
                    force: false,
                    grid: None,
                });
            }
        }
        experiments.push(Experiment::LogDichotomy { d: 1, p0: 2.0, gamma0: 0.0, p1: 1.5, gamma1: -0.25 });
        let spec = |t: &str| Spec::from_json_str(t).expect("suite spec parses");
        experiments.push(Experiment::Lacunary {
            src: spec(r#"{"family":"B","s":1,"p":2,"q":"inf","gamma":0,"dim":1}"#),
            tgt: spec(r#"{"family":"B","s":"3/4","p":4,"q":1,"gamma":0,"dim":1}"#),
            n: vec![4, 6, 8, 12, 16, 24, 32],
            grid: None,
        });
        for g in [0.0, 0.5] {
            experiments.push(Experiment::Equivalences { gamma: g, batch: default_batch(), grid: None });
        }
        experiments.push(Experiment::Gagliardo {
            s0: 0.0,
            s1: 2.0,
            theta: 0.5,
            p: p(2.0),
            q: p(2.0),
            gamma: 0.5,
            batch: default_batch(),
            grid: None,
        });
        experiments.push(Experiment::Coherence { pairs: None, bench: None });
        RunConfig { grid: GridSpec::default(), seed: 0, out: None, jobs: None, experiments }
    }
}

/// Hex SHA-256 of the compact JSON text of `v` (object keys sorted).
pub fn content_hash(v: &Value) -> String {
    let digest = Sha256::digest(v.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// [`content_hash`] of the parts of a config that determine the results (grid, seed, experiments).
pub fn config_hash(cfg: &RunConfig) -> String {
    content_hash(&json!({ "grid": cfg.grid, "seed": cfg.seed, "experiments": cfg.experiments }))
}

fn grid_or(grid: &Option<GridSpec>, fallback: GridSpec) -> Result<Grid<f64>> {
    grid.unwrap_or(fallback).build()
}

fn with_ids(prefix: &str, mut reports: Vec<ExperimentReport>, seed: Option<u64>) -> Vec<ExperimentReport> {
    let single = reports.len() == 1;
    for (i, r) in reports.iter_mut().enumerate() {
        r.id = if single { prefix.to_string() } else { format!("{prefix}_{i:02}_{}", r.id) };
        if r.seed.is_none() {
            r.seed = seed;
        }
    }
    reports
}

/// Run one experiment. `index` makes report ids unique within a suite.
pub fn run_experiment(exp: &Experiment, cfg: &RunConfig, index: usize) -> Result<Vec<ExperimentReport>> {
    let prefix = format!("{index:03}_{}", exp.kind());
    let seed = cfg.seed;
    let reports = match exp {
        Experiment::PeakScaling { p, gamma, j, n, grid } => {
            let g = grid_or(grid, cfg.grid)?;
            vec![check_peak_scaling(&make_dyadic(&g), *p, *gamma, *j, n)?]
        }
        Experiment::TranslationScaling { p, gamma, lambda, band, grid } => {
            let g = grid_or(grid, GridSpec { d: cfg.grid.d, l: 128.0, n: 1 << 12 })?;
            let base = centered_gaussian(&g, *band)?;
            vec![check_translation_scaling(&base, *p, *gamma, lambda)?]
        }
        Experiment::Nikolskij { p0, gamma0, p1, gamma1, alpha, t, bases, force, grid } => {
            let g = grid_or(grid, GridSpec { d: cfg.grid.d, l: 64.0, n: 1 << 13 })?;
            let mut out = Vec::new();
            for b in 0..*bases {
                let base = random_band_limited(&g, 1.0, seed.wrapping_add(u64::from(b)))?;
                let dil = Dilations::new(&base, t)?;
                let mut rep = check_nikolskij(&dil, *p0, *gamma0, *p1, *gamma1, alpha, *force)?;
                rep.seed = Some(seed.wrapping_add(u64::from(b)));
                out.push(rep);
            }
            out
        }
        Experiment::Gagliardo { s0, s1, theta, p, q, gamma, batch, grid } => {
            let g = grid_or(grid, GridSpec { d: cfg.grid.d, l: 16.0, n: 1 << 11 })?;
            let fields = block_batch(&g, *batch, seed)?;
            vec![check_gagliardo(&Analyzer::new(&g), &fields, *s0, *s1, *theta, *p, *q, *gamma)?]
        }
        Experiment::Equivalences { gamma, batch, grid } => {
            let g = grid_or(grid, GridSpec { d: cfg.grid.d, l: 16.0, n: 1 << 11 })?;
            let fields = block_batch(&g, *batch, seed)?;
            check_equivalences(&Analyzer::new(&g), &fields, *gamma)?
        }
        Experiment::LogDichotomy { d, p0, gamma0, p1, gamma1 } => {
            vec![check_log_dichotomy(*d, *p0, *gamma0, *p1, *gamma1)?]
        }
        Experiment::Lacunary { src, tgt, n, grid } => {
            let g = grid_or(grid, GridSpec { d: src.d, l: 16.0, n: 1 << 12 })?;
            let (s, t) = (src.validate()?.to_f64(), tgt.validate()?.to_f64());
            vec![check_lacunary(&make_dyadic(&g), &s, &t, n)?]
        }
        Experiment::Coherence { pairs, bench } => {
            let list: Vec<(String, Spec, Spec)> = match pairs {
                Some(p) => p.iter().enumerate().map(|(i, (a, b))| (format!("pair{i:02}"), a.clone(), b.clone())).collect(),
                None => curated_pairs().into_iter().map(|c| (c.label.to_string(), c.src, c.tgt)).collect(),
            };
            coherence_reports(&list, bench.clone())?
        }
    };
    Ok(with_ids(&prefix, reports, Some(seed)))
}

fn block_batch(g: &Grid<f64>, count: usize, seed: u64) -> Result<Vec<crate::lpengine::Field<f64>>> {
    (0..count as u64).into_par_iter().map(|i| random_block_field(g, 6, seed.wrapping_mul(1000).wrapping_add(i))).collect()
}

/// Exercise every pair: failure demonstrations for negative verdicts, bounded
/// ratios for embeddings, and an explicit listing for unknown verdicts.
fn coherence_reports(pairs: &[(String, Spec, Spec)], bench: Option<BenchConfig>) -> Result<Vec<ExperimentReport>> {
    let d = pairs.first().map(|p| p.1.d).unwrap_or(1);
    let bench = Bench::new(bench.unwrap_or_else(|| BenchConfig::default_for(d)))?;
    let mut out = Vec::new();
    for (label, src, tgt) in pairs {
        let verdict = decide(src, tgt)?;
        match verdict.outcome {
            Outcome::DoesNotEmbed => {
                let mut rep = demonstrate_failure(&bench, src, tgt)?;
                rep.id = format!("{label}_{}", rep.id);
                out.push(rep);
            }
            Outcome::Embeds => {
                for mut rep in check_embedding(&bench, src, tgt)? {
                    rep.id = format!("{label}_{}", rep.id);
                    out.push(rep);
                }
            }
            Outcome::Unknown => {
                let mut rep = ExperimentReport::new(
                    format!("{label}_unknown"),
                    super::PassRule::Listed,
                    "oracle verdict unknown: listed, not decided",
                );
                rep.source = Some(src.to_f64());
                rep.target = Some(tgt.to_f64());
                rep.parameters = serde_json::to_value(&verdict)?;
                rep.notes.push(format!("unknown verdict: {src} -> {tgt}"));
                out.push(rep.evaluate());
            }
        }
    }
    Ok(out)
}

/// Reports and per-experiment errors of a suite run.
#[derive(Debug, Default)]
pub struct SuiteOutcome {
    pub reports: Vec<ExperimentReport>,
    pub errors: Vec<(String, String)>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.reports.iter().all(|r| r.pass)
    }
}

/// Run every experiment, at most `cfg.jobs` at a time.
pub fn run_suite(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let jobs = cfg.jobs.unwrap_or(1).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Condition(format!("thread pool: {e}")))?;
    let results: Vec<(usize, Result<Vec<ExperimentReport>>)> = pool.install(|| {
        cfg.experiments.par_iter().enumerate().map(|(i, e)| (i, run_experiment(e, cfg, i))).collect()
    });
    let mut outcome = SuiteOutcome::default();
    for (i, r) in results {
        match r {
            Ok(reps) => outcome.reports.extend(reps),
            Err(e) => outcome.errors.push((format!("{i:03}_{}", cfg.experiments[i].kind()), e.to_string())),
        }
    }
    Ok(outcome)
}
