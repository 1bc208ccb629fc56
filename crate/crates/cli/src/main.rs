use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use powemb::lpengine::{make_dyadic, Grid};
use powemb::oracle::embedding_matrix;
use powemb::params::parse_rational;
use powemb::verify::{centered_gaussian, config_hash, content_hash, run_suite, GridSpec, RunConfig};
use powemb::witnesses::{
    dilation_family, lacunary_family, log_singularity, log_singularity_unweighted, profile_family, random_band_limited,
    riesz_log, spectral_peaks, translation_family, WitnessKind,
};
use powemb::{decide, Error, Extended, Outcome, Spec};

/// Input the user can fix: bad JSON, bad parameters, inconsistent dimensions.
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;
const EXIT_VERIFY_FAILED: u8 = 3;
const OUT_ENV: &str = "POWEMB_OUT";

#[derive(Parser, Debug)]
#[command(name = "powemb", version, about = "Embeddings between power-weighted function spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Output directory (the POWEMB_OUT environment variable takes precedence).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum number of experiments run at once.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for random witnesses and batches.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid as `d,L,N`; N may be written `2^k`.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<GridSpec>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether SRC embeds into TGT. Exit 0 embeds, 1 does not, 2 unknown.
    Decide {
        /// Source descriptor, e.g. '{"family":"B","s":1,"p":2,"q":1,"gamma":0,"dim":1}'.
        src: String,
        /// Target descriptor.
        tgt: String,
    },
    /// Pairwise verdicts for a JSON array of descriptors.
    Lattice {
        file: PathBuf,
        /// Print the matrix as JSON instead of a text table.
        #[arg(long)]
        json: bool,
    },
    /// Write a witness family and its manifest.
    Witness(WitnessArgs),
    /// Run an experiment suite (the built-in one when no config is given).
    Verify {
        config: Option<PathBuf>,
        /// Print the experiment catalog and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum WitnessName {
    Peaks,
    Dilation,
    Translation,
    Lacunary,
    Logsing,
    Rieszlog,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    kind: WitnessName,
    /// Peak offset j in {-1, 0, 1}.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    j: i32,
    /// Indices: `3..7` or `3,4,5` (peaks: block index, lacunary: number of terms).
    #[arg(long, value_parser = parse_indices)]
    n: Option<Indices>,
    /// Dilation factors.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    t: Option<Numbers>,
    /// Translation distances.
    #[arg(long, value_parser = parse_list)]
    lambda: Option<Numbers>,
    /// Spectral band of the base field.
    #[arg(long, value_parser = parse_number)]
    band: Option<f64>,
    /// Integrability (lacunary source).
    #[arg(long, value_parser = parse_extended)]
    p: Option<Extended<f64>>,
    /// Weight exponent (lacunary source).
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Smoothness (lacunary source).
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    s0: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    p0: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    p1: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    gamma0: Option<f64>,
    /// Power and log exponents of `r^{-a} log(1/r)^{-b}`.
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Inner cutoffs of a profile; one member per value.
    #[arg(long, value_parser = parse_list)]
    eps: Option<Numbers>,
    /// Use the exponent -d/p0 instead of -(d+gamma0)/p0.
    #[arg(long)]
    unweighted: bool,
}

// ------------------------------------------------------------------ parsing

/// A comma list of numbers taken as one argument.
#[derive(Clone, Debug)]
struct Numbers(Vec<f64>);

#[derive(Clone, Debug)]
struct Indices(Vec<u32>);

fn parse_number(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let v = match t.split_once('/') {
        Some((a, b)) => {
            parse_rational(t).map_err(|e| e.to_string())?;
            a.trim().parse::<f64>().unwrap_or(f64::NAN) / b.trim().parse::<f64>().unwrap_or(f64::NAN)
        }
        None => t.parse::<f64>().map_err(|_| format!("expected a number, got {t:?}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got {t:?}"))
    }
}

fn parse_extended(text: &str) -> Result<Extended<f64>, String> {
    match text.trim() {
        "inf" | "infinity" => Ok(Extended::Infinite),
        t => parse_number(t).map(Extended::Finite),
    }
}

fn parse_list(text: &str) -> Result<Numbers, String> {
    text.split(',').map(parse_number).collect::<Result<_, _>>().map(Numbers)
}

fn parse_count(text: &str) -> Result<usize, String> {
    let t = text.trim();
    if let Some(k) = t.strip_prefix("2^") {
        let k: u32 = k.parse().map_err(|_| format!("bad exponent in {t:?}"))?;
        return 1usize.checked_shl(k).ok_or_else(|| format!("{t} is too large"));
    }
    t.parse().map_err(|_| format!("expected an integer, got {t:?}"))
}

fn parse_indices(text: &str) -> Result<Indices, String> {
    let bad = || format!("expected `a..b` or a comma list, got {text:?}");
    if let Some((a, b)) = text.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok(Indices((a..=b).collect()));
    }
    text.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>().map(Indices)
}

fn parse_grid(text: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("grid must be `d,L,N`, got {text:?}"));
    }
    let d: u32 = parts[0].trim().parse().map_err(|_| format!("bad dimension {:?}", parts[0]))?;
    Ok(GridSpec { d, l: parse_number(parts[1])?, n: parse_count(parts[2])? })
}

// ------------------------------------------------------------------ errors

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Io(_)) { EXIT_IO } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        let code = if e.is_io() { EXIT_IO } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type CmdResult = Result<u8, Failure>;

// ------------------------------------------------------------------ commands

/// Print to stdout; a closed pipe (`powemb ... | head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

impl Global {
    /// `POWEMB_OUT`, then `--out`.
    fn out_dir(&self) -> Option<PathBuf> {
        std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from).or_else(|| self.out.clone())
    }
}

fn default_grid_for(d: u32) -> GridSpec {
    match d {
        2 => GridSpec { d: 2, l: 16.0, n: 1 << 9 },
        _ => GridSpec::default(),
    }
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn cmd_decide(src: &str, tgt: &str) -> CmdResult {
    let src = Spec::from_json_str(src)?;
    let tgt = Spec::from_json_str(tgt)?;
    let verdict = decide(&src, &tgt)?;
    say!("{}", serde_json::to_string_pretty(&verdict)?);
    Ok(match verdict.outcome {
        Outcome::Embeds => 0,
        Outcome::DoesNotEmbed => 1,
        Outcome::Unknown => 2,
    })
}

fn cmd_lattice(file: &Path, as_json: bool, global: &Global) -> CmdResult {
    let text = fs::read_to_string(file)?;
    let raw: Vec<Value> = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let specs: Vec<Spec> = raw.iter().map(Spec::from_json_value).collect::<powemb::Result<_>>()?;
    if let Some(first) = specs.first() {
        if let Some(other) = specs.iter().find(|s| s.d != first.d) {
            return Err(Error::DimensionMismatch(first.d, other.d).into());
        }
    }
    let matrix = embedding_matrix(&specs);
    let labels: Vec<String> = specs.iter().map(|s| s.to_string()).collect();
    let hash = content_hash(&Value::Array(raw));
    let report = json!({ "config_hash": hash, "specs": specs, "matrix": matrix });
    if as_json {
        say!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        say!("{}", matrix.render(&labels).trim_end());
    }
    if let Some(dir) = global.out_dir() {
        write_json(&dir.join("lattice.json"), &report)?;
    }
    Ok(if matrix.violations.is_empty() { 0 } else { EXIT_VERIFY_FAILED })
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, Failure> {
    v.clone().ok_or_else(|| usage(format!("missing --{flag}")))
}

fn cmd_witness(w: &WitnessArgs, global: &Global) -> CmdResult {
    let seed = global.seed.unwrap_or(0);
    let grid_spec = global.grid.unwrap_or_else(|| default_grid_for(1));
    let grid = || -> Result<Grid<f64>, Failure> { Ok(grid_spec.build()?) };
    let family = match w.kind {
        WitnessName::Peaks => spectral_peaks(&make_dyadic(&grid()?), &need(&w.n, "n")?.0, w.j)?,
        WitnessName::Dilation => {
            let base = random_band_limited(&grid()?, w.band.unwrap_or(1.0), seed)?;
            dilation_family(&base, &need(&w.t, "t")?.0)?
        }
        WitnessName::Translation => {
            let base = centered_gaussian(&grid()?, w.band.unwrap_or(8.0))?;
            translation_family(&base, &need(&w.lambda, "lambda")?.0)?
        }
        WitnessName::Lacunary => lacunary_family(
            &make_dyadic(&grid()?),
            &need(&w.n, "n")?.0,
            need(&w.s0, "s0")?,
            need(&w.p, "p")?,
            w.gamma.unwrap_or(0.0),
        )?,
        WitnessName::Logsing => {
            let (p0, p1, g0) = (need(&w.p0, "p0")?, need(&w.p1, "p1")?, w.gamma0.unwrap_or(0.0));
            let build = if w.unweighted { log_singularity_unweighted } else { log_singularity };
            let prof = build(p0, g0, p1, grid_spec.d, 0.0)?;
            profile_family(WitnessKind::LogSingularity, prof, &w.eps.clone().map_or_else(|| vec![1e-4], |e| e.0))?
        }
        WitnessName::Rieszlog => {
            let prof = riesz_log(need(&w.a, "a")?, need(&w.b, "b")?, grid_spec.d, 0.0)?;
            profile_family(WitnessKind::RieszLog, prof, &w.eps.clone().map_or_else(|| vec![1e-4], |e| e.0))?
        }
    };
    let request = json!({
        "witness": family.kind,
        "parameters": family.parameters,
        "values": family.values,
        "seed": seed,
        "p": w.p.map(|p| p.to_string()),
        "gamma": w.gamma,
    });
    let hash = content_hash(&request);
    let dir = global.out_dir().unwrap_or_else(|| PathBuf::from("powemb-out")).join(family.kind.code());
    let manifest = family.write(&dir, &hash)?;
    say!("{} member(s) written to {}", manifest.members.len(), dir.display());
    Ok(0)
}

fn catalog() -> String {
    let kinds = [
        ("peak_scaling", "peak norms along 2^n; slope d - (d+gamma)/p"),
        ("translation_scaling", "translated Gaussian norms along lambda; slope gamma/p"),
        ("nikolskij", "two-weight Nikol'skij ratio of dilated unit-band bases, bounded by t^(|alpha|+delta)"),
        ("gagliardo", "interpolation inequality between F^s0 and F^s1 on random block fields"),
        ("equivalences", "lifting, differentiation, sandwich and W/H ratio windows"),
        ("log_dichotomy", "log-singular profile: finite source norm, divergent target norm"),
        ("lacunary", "lacunary sums on the sharp line; slope 1/q1 - 1/q0"),
        ("coherence", "oracle verdicts checked against witness experiments"),
    ];
    let mut out = String::from("experiment kinds:\n");
    for (k, d) in kinds {
        out.push_str(&format!("  {k:20} {d}\n"));
    }
    out.push_str("default suite:\n");
    for (i, e) in RunConfig::default_suite().experiments.iter().enumerate() {
        out.push_str(&format!("  {i:03} {}\n", e.describe()));
    }
    out
}

fn cmd_verify(config: Option<&Path>, list: bool, global: &Global) -> CmdResult {
    if list {
        say!("{}", catalog().trim_end());
        return Ok(0);
    }
    let mut cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default_suite(),
    };
    if let Some(g) = global.grid {
        cfg.grid = g;
    }
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(j) = global.jobs {
        cfg.jobs = Some(j);
    }
    if let Some(o) = global.out_dir() {
        cfg.out = Some(o);
    }
    if cfg.jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("powemb-out"));
    let hash = config_hash(&cfg);
    let outcome = run_suite(&cfg)?;
    for rep in &outcome.reports {
        rep.write(&out, &hash)?;
        say!("{}", rep.summary());
    }
    for (id, err) in &outcome.errors {
        say!("ERROR {id}: {err}");
    }
    let passed = outcome.reports.iter().filter(|r| r.pass).count();
    let failed = outcome.reports.len() - passed;
    let summary = json!({
        "config_hash": hash,
        "config": json!({ "grid": cfg.grid, "seed": cfg.seed, "experiments": cfg.experiments }),
        "passed": passed,
        "failed": failed,
        "errors": outcome.errors.iter().map(|(id, e)| json!({"id": id, "error": e})).collect::<Vec<_>>(),
        "reports": outcome.reports.iter().map(|r| json!({"id": r.id, "pass": r.pass, "summary": r.summary()})).collect::<Vec<_>>(),
    });
    write_json(&out.join("summary.json"), &summary)?;
    say!("{passed} passed, {failed} failed, {} errored; reports in {}", outcome.errors.len(), out.display());
    Ok(if outcome.passed() { 0 } else { EXIT_VERIFY_FAILED })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Decide { src, tgt } => cmd_decide(src, tgt),
        Command::Lattice { file, json } => cmd_lattice(file, *json, &cli.global),
        Command::Witness(w) => cmd_witness(w, &cli.global),
        Command::Verify { config, list } => cmd_verify(config.as_deref(), *list, &cli.global),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
