//! Extremal families used to show that an embedding fails: dilations,
//! translations, spectral peaks, lacunary sums and log-singular profiles.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{range, Error, Result};
use crate::lpengine::io::{log_mesh, write_field, write_profile_csv};
use crate::lpengine::{weighted_lp, DyadicSystem, Field, Grid, RadialProfile};
use crate::norms::lq_aggregate;
use crate::params::Extended;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Dilation,
    Translation,
    SpectralPeak,
    LacunarySum,
    LogSingularity,
    RieszLog,
}

impl WitnessKind {
    pub fn code(self) -> &'static str {
        match self {
            WitnessKind::Dilation => "dilation",
            WitnessKind::Translation => "translation",
            WitnessKind::SpectralPeak => "peaks",
            WitnessKind::LacunarySum => "lacunary",
            WitnessKind::LogSingularity => "logsing",
            WitnessKind::RieszLog => "rieszlog",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Member<T: Real> {
    Field(Field<T>),
    Profile(RadialProfile),
}

impl<T: Real> Member<T> {
    pub fn field(&self) -> Option<&Field<T>> {
        match self {
            Member::Field(f) => Some(f),
            Member::Profile(_) => None,
        }
    }
    pub fn profile(&self) -> Option<&RadialProfile> {
        match self {
            Member::Profile(p) => Some(p),
            Member::Field(_) => None,
        }
    }
}

type Generator<T> = Arc<dyn Fn(f64) -> Result<Member<T>> + Send + Sync>;

/// A one-parameter family whose members are built on demand.
#[derive(Clone)]
pub struct WitnessFamily<T: Real> {
    pub kind: WitnessKind,
    /// Construction parameters, recorded for provenance.
    pub parameters: Value,
    /// Family parameter of each member (`t`, `λ`, `n`, `ε`, …).
    pub values: Vec<f64>,
    generator: Generator<T>,
}

impl<T: Real> fmt::Debug for WitnessFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WitnessFamily")
            .field("kind", &self.kind)
            .field("parameters", &self.parameters)
            .field("values", &self.values)
            .finish()
    }
}

impl<T: Real> WitnessFamily<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn member(&self, i: usize) -> Result<Member<T>> {
        let v = *self.values.get(i).ok_or_else(|| Error::Range(format!("no member {i}")))?;
        (self.generator)(v)
    }
    pub fn members(&self) -> Result<Vec<Member<T>>> {
        self.values.par_iter().map(|&v| (self.generator)(v)).collect()
    }

    pub fn manifest(&self, files: Option<&[String]>) -> Manifest {
        Manifest {
            kind: self.kind,
            parameters: self.parameters.clone(),
            members: self
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| ManifestEntry { index: i, parameter: v, file: files.map(|f| f[i].clone()) })
                .collect(),
        }
    }

    /// Write every member plus `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path, config_hash: &str) -> Result<Manifest> {
        fs::create_dir_all(dir)?;
        let members = self.members()?;
        let mut files = Vec::with_capacity(members.len());
        for (i, m) in members.iter().enumerate() {
            let name = match m {
                Member::Field(f) => {
                    let name = format!("{}_{i:03}.bin", self.kind.code());
                    write_field(&dir.join(&name), f, config_hash)?;
                    name
                }
                Member::Profile(p) => {
                    let name = format!("{}_{i:03}.csv", self.kind.code());
                    let lo = if p.inner_cutoff > 0.0 { p.inner_cutoff * 1.000_001 } else { 1e-12 };
                    let radii = log_mesh(lo, p.outer(), 512);
                    let mut out = fs::File::create(dir.join(&name))?;
                    write_profile_csv(&mut out, p, &radii, config_hash)?;
                    name
                }
            };
            files.push(name);
        }
        let manifest = self.manifest(Some(&files));
        let mut text = serde_json::to_string_pretty(&ManifestFile { config_hash, manifest: &manifest })?;
        text.push('\n');
        fs::write(dir.join("manifest.json"), text)?;
        Ok(manifest)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub parameter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: WitnessKind,
    pub parameters: Value,
    pub members: Vec<ManifestEntry>,
}

#[derive(Serialize)]
struct ManifestFile<'a> {
    config_hash: &'a str,
    #[serde(flatten)]
    manifest: &'a Manifest,
}

// ---------------------------------------------------------------- dilation

/// `∫ f(x) e^{−iη·x} dx` of the sampled field at the frequencies
/// `etas[0] × etas[1]` (tensor set; one axis in d = 1).
fn sampled_transform<T: Real>(f: &Field<T>, etas: &[Vec<f64>]) -> Vec<Complex<f64>> {
    let g = f.grid();
    let n = g.n();
    let h = g.h().as_f64();
    let coords: Vec<f64> = (0..n).map(|j| g.coord(j).as_f64()).collect();
    let phases = |eta: &[f64]| -> Vec<Vec<Complex<f64>>> {
        eta.par_iter().map(|&e| coords.iter().map(|&x| Complex::new(0.0, -e * x).exp()).collect()).collect()
    };
    let vals: Vec<Complex<f64>> = f.values().iter().map(|v| Complex::new(v.re.as_f64(), v.im.as_f64())).collect();
    if g.d() == 1 {
        let ph = phases(&etas[0]);
        return ph.par_iter().map(|row| row.iter().zip(&vals).map(|(a, b)| a * b).sum::<Complex<f64>>() * h).collect();
    }
    let ph1 = phases(&etas[0]);
    let ph2 = phases(&etas[1]);
    let m2 = etas[1].len();
    // partial[j1][m2] = Σ_{j2} f(j1, j2) e^{−i η2 x_{j2}}
    let partial: Vec<Vec<Complex<f64>>> = (0..n)
        .into_par_iter()
        .map(|j1| {
            let row = &vals[j1 * n..(j1 + 1) * n];
            ph2.iter().map(|p| p.iter().zip(row).map(|(a, b)| a * b).sum()).collect()
        })
        .collect();
    ph1.par_iter()
        .flat_map_iter(|p1| {
            let partial = &partial;
            (0..m2).map(move |b| p1.iter().enumerate().map(|(j1, a)| a * partial[j1][b]).sum::<Complex<f64>>() * (h * h))
        })
        .collect()
}

fn lattice_index<T: Real>(g: &Grid<T>, xi: f64) -> i64 {
    (xi / g.dxi().as_f64()).round() as i64
}

/// `t^d f(t x)` on the same grid, via `f̂_t(ξ) = f̂(ξ/t)` evaluated from the samples of `f`.
pub fn dilate<T: Real>(base: &Field<T>, t: f64) -> Result<Field<T>> {
    if !(t > 0.0) {
        return range(format!("dilation parameter must be positive, got {t}"));
    }
    let band = base
        .band_limit()
        .ok_or_else(|| Error::Range("dilation needs a band-limited base".into()))?
        .as_f64();
    let g = base.grid();
    let new_band = t * band;
    if new_band >= g.xi_max().as_f64() {
        return Err(Error::Nyquist { requested: new_band, available: g.xi_max().as_f64() });
    }
    if t == 1.0 {
        return Ok(base.clone());
    }
    let kmax = (new_band / g.dxi().as_f64()).floor() as i64;
    let ks: Vec<i64> = (-kmax..=kmax).collect();
    let axis: Vec<f64> = ks.iter().map(|&k| k as f64 * g.dxi().as_f64() / t).collect();
    let d = g.d() as usize;
    let etas = vec![axis; d];
    let table = sampled_transform(base, &etas);
    let m = ks.len();
    Field::from_fourier(g, Some(T::lit(new_band)), |xi| {
        let i = (lattice_index(g, xi[0].as_f64()) + kmax) as usize;
        let v = if d == 1 {
            table[i]
        } else {
            let j = (lattice_index(g, xi[1].as_f64()) + kmax) as usize;
            table[i * m + j]
        };
        Complex::new(T::lit(v.re), T::lit(v.im))
    })
}

pub fn dilation_family<T: Real>(base: &Field<T>, t_values: &[f64]) -> Result<WitnessFamily<T>> {
    let band = base
        .band_limit()
        .ok_or_else(|| Error::Range("dilation needs a band-limited base".into()))?
        .as_f64();
    let xi_max = base.grid().xi_max().as_f64();
    for &t in t_values {
        if !(t > 0.0) {
            return range(format!("dilation parameter must be positive, got {t}"));
        }
        if t * band >= xi_max {
            return Err(Error::Nyquist { requested: t * band, available: xi_max });
        }
    }
    let b = base.clone();
    Ok(WitnessFamily {
        kind: WitnessKind::Dilation,
        parameters: json!({ "base_band": band, "grid": grid_json(base.grid()), "normalization": "t^d f(t x)" }),
        values: t_values.to_vec(),
        generator: Arc::new(move |t| Ok(Member::Field(dilate(&b, t)?))),
    })
}

// ------------------------------------------------------------- translation

/// Largest `|x_1|` where `|f| > 1e−10 · max |f|`.
pub fn axis_extent<T: Real>(f: &Field<T>) -> f64 {
    let cut = f.max_abs().as_f64() * 1e-10;
    let g = f.grid();
    (0..g.len())
        .filter(|&i| f.values()[i].norm().as_f64() > cut)
        .map(|i| g.point(i)[0].as_f64().abs())
        .fold(0.0, f64::max)
}

/// `f(· − λ e_1)` via the modulation `e^{−iλξ_1}`.
pub fn translate<T: Real>(base: &Field<T>, lambda: f64) -> Result<Field<T>> {
    let g = base.grid();
    let room = 0.95 * g.l().as_f64();
    let reach = axis_extent(base) + lambda.abs();
    if reach > room {
        return Err(Error::Boundary(format!(
            "support reaches |x_1| = {reach:.3} after a shift by {lambda}, beyond {room:.3}"
        )));
    }
    if lambda == 0.0 {
        return Ok(base.clone());
    }
    let lam = T::lit(lambda);
    Ok(base.apply_multiplier(|xi| {
        let ph = -lam * xi[0];
        Complex::new(ph.cos(), ph.sin())
    }))
}

pub fn translation_family<T: Real>(base: &Field<T>, lambda_values: &[f64]) -> Result<WitnessFamily<T>> {
    let extent = axis_extent(base);
    let room = 0.95 * base.grid().l().as_f64();
    if let Some(&worst) = lambda_values.iter().max_by(|a, b| a.abs().total_cmp(&b.abs())) {
        if extent + worst.abs() > room {
            return Err(Error::Boundary(format!(
                "support reaches |x_1| = {:.3} after a shift by {worst}, beyond {room:.3}",
                extent + worst.abs()
            )));
        }
    }
    let b = base.clone();
    Ok(WitnessFamily {
        kind: WitnessKind::Translation,
        parameters: json!({ "extent": extent, "grid": grid_json(base.grid()), "direction": "e1" }),
        values: lambda_values.to_vec(),
        generator: Arc::new(move |lam| Ok(Member::Field(translate(&b, lam)?))),
    })
}

// ----------------------------------------------------------- spectral peaks

/// `φ_n ∗ φ_{n+j}`, realized as the inverse transform of `φ̂_n φ̂_{n+j}`.
pub fn peak<T: Real>(sys: &DyadicSystem<T>, n: u32, j: i32) -> Result<Field<T>> {
    if !(-1..=1).contains(&j) {
        return range(format!("j must be -1, 0 or 1 (φ_n ∗ φ_(n+j) vanishes for |j| ≥ 2), got {j}"));
    }
    if n < 2 {
        return range(format!("peak index n must be at least 2, got {n}"));
    }
    let top = (n as i32 + j.max(0)) as u32;
    let need = DyadicSystem::<T>::band(top.max(n + 1));
    let g = sys.grid();
    if need >= g.xi_max().as_f64() || top > sys.k_max() {
        return Err(Error::Nyquist { requested: need, available: g.xi_max().as_f64() });
    }
    let a = sys.hat_phi(n);
    let b = sys.hat_phi((n as i32 + j) as u32);
    let h_d = g.h().powi(g.d() as i32);
    let spec: Vec<Complex<T>> = (0..g.len())
        .map(|idx| {
            let v = a[idx] * b[idx];
            if v == T::zero() {
                return Complex::new(T::zero(), T::zero());
            }
            let [i, k] = g.split(idx);
            let mut sign = g.signed(i);
            if g.d() == 2 {
                sign += g.signed(k);
            }
            let s = if sign.rem_euclid(2) == 0 { T::one() } else { -T::one() };
            Complex::new(v * s / h_d, T::zero())
        })
        .collect();
    let band = DyadicSystem::<T>::band(n.min((n as i32 + j) as u32));
    Field::from_spectrum(g, spec, Some(T::lit(band)))
}

pub fn spectral_peaks<T: Real>(sys: &DyadicSystem<T>, n_values: &[u32], j: i32) -> Result<WitnessFamily<T>> {
    for &n in n_values {
        peak(sys, n, j)?;
    }
    let s = sys.clone();
    Ok(WitnessFamily {
        kind: WitnessKind::SpectralPeak,
        parameters: json!({ "j": j, "grid": grid_json(sys.grid()) }),
        values: n_values.iter().map(|&n| f64::from(n)).collect(),
        generator: Arc::new(move |n| Ok(Member::Field(peak(&s, n as u32, j)?))),
    })
}

// --------------------------------------------------------------- lacunary

/// Lacunary sums with `a_j ≡ 1`, one member per term count `n`, evaluated
/// directly on the grid (so `3n` blocks must fit below Nyquist).
pub fn lacunary_family<T: Real>(
    sys: &DyadicSystem<T>,
    n_values: &[u32],
    s0: f64,
    p0: Extended<f64>,
    gamma0: f64,
) -> Result<WitnessFamily<T>> {
    if let Some(&top) = n_values.iter().max() {
        lacunary_sum(sys, &vec![1.0; top as usize], s0, p0, gamma0)?;
    }
    let s = sys.clone();
    Ok(WitnessFamily {
        kind: WitnessKind::LacunarySum,
        parameters: json!({ "s0": s0, "p0": p0, "gamma0": gamma0, "coefficients": "a_j = 1", "grid": grid_json(sys.grid()) }),
        values: n_values.iter().map(|&n| f64::from(n)).collect(),
        generator: Arc::new(move |n| Ok(Member::Field(lacunary_sum(&s, &vec![1.0; n as usize], s0, p0, gamma0)?))),
    })
}

/// Coefficient `2^{−3j(d + s0 − (d+γ0)/p0)}` of `φ_{3j}` in the lacunary sum.
pub fn lacunary_weight(d: u32, j: u32, s0: f64, p0: Extended<f64>, gamma0: f64) -> f64 {
    let shifted = f64::from(d) + s0 - p0.divide_f64(f64::from(d) + gamma0);
    (-3.0 * f64::from(j) * shifted).exp2()
}

/// `Σ_j 2^{−3j(d + s0 − (d+γ0)/p0)} a_j φ_{3j}` as one field.
pub fn lacunary_sum<T: Real>(
    sys: &DyadicSystem<T>,
    coeffs: &[f64],
    s0: f64,
    p0: Extended<f64>,
    gamma0: f64,
) -> Result<Field<T>> {
    let g = sys.grid();
    let top = 3 * coeffs.len() as u32;
    let need = DyadicSystem::<T>::band(top);
    if need >= g.xi_max().as_f64() || top > sys.k_max() {
        return Err(Error::Nyquist { requested: need, available: g.xi_max().as_f64() });
    }
    let d = g.d();
    let w: Vec<f64> = (1..=coeffs.len() as u32).map(|j| lacunary_weight(d, j, s0, p0, gamma0)).collect();
    Field::from_fourier(g, Some(T::lit(need)), |xi| {
        let r: f64 = xi.iter().map(|x| x.as_f64() * x.as_f64()).sum::<f64>().sqrt();
        let v: f64 = coeffs
            .iter()
            .zip(&w)
            .enumerate()
            .map(|(i, (a, wj))| a * wj * crate::lpengine::phi_hat(3 * (i as u32 + 1), r))
            .sum();
        Complex::new(T::lit(v), T::zero())
    })
}

/// The lacunary sum kept in closed form, for any number of terms.
///
/// Block `S_k f` is `c_j φ_k ∗ φ_{3j}` for `k ∈ {3j−1, 3j, 3j+1}`, and
/// `φ_k ∗ φ_{k+i}` is an exact `L^1`-normalized dilation of the reference peak
/// `φ_m ∗ φ_{m+i}`, so every block norm is a power of two times one of three
/// reference norms measured on the grid.
#[derive(Clone, Debug)]
pub struct LacunarySeries {
    pub d: u32,
    pub coeffs: Vec<f64>,
    pub s0: f64,
    pub p0: Extended<f64>,
    pub gamma0: f64,
}

/// Reference level used for the measured peak norms.
pub const LACUNARY_REFERENCE: u32 = 6;

impl LacunarySeries {
    /// `‖φ_k ∗ φ_{k+i}‖_{L^p(w)}` from the reference level by exact scaling.
    fn block_lp(refs: &[f64; 3], d: u32, k: u32, i: i32, p: Extended<f64>, gamma: f64) -> f64 {
        let expo = f64::from(d) - p.divide_f64(f64::from(d) + gamma);
        refs[(i + 1) as usize] * ((f64::from(k) - f64::from(LACUNARY_REFERENCE)) * expo).exp2()
    }

    /// Measured `‖φ_m ∗ φ_{m+i}‖_{L^p(w)}`, `i = −1, 0, 1`, at the reference level.
    pub fn reference_norms<T: Real>(sys: &DyadicSystem<T>, p: Extended<f64>, gamma: f64) -> Result<[f64; 3]> {
        let m = LACUNARY_REFERENCE;
        let mut out = [0.0; 3];
        for (slot, i) in [-1, 0, 1].into_iter().enumerate() {
            out[slot] = weighted_lp(&peak(sys, m, i)?, p, gamma)?.as_f64();
        }
        Ok(out)
    }

    /// Per-block `(k, 2^{ks} ‖S_k f‖_{L^p(w)})` and the `ℓ^q` aggregate.
    pub fn besov_norm<T: Real>(
        &self,
        sys: &DyadicSystem<T>,
        s: f64,
        p: Extended<f64>,
        q: Extended<f64>,
        gamma: f64,
    ) -> Result<(f64, Vec<(u32, f64)>)> {
        if sys.grid().d() != self.d {
            return Err(Error::DimensionMismatch(self.d, sys.grid().d()));
        }
        let refs = Self::reference_norms(sys, p, gamma)?;
        let mut blocks = Vec::with_capacity(3 * self.coeffs.len());
        for (idx, &a) in self.coeffs.iter().enumerate() {
            let j = idx as u32 + 1;
            let c = a.abs() * lacunary_weight(self.d, j, self.s0, self.p0, self.gamma0);
            for k in [3 * j - 1, 3 * j, 3 * j + 1] {
                let i = 3 * j as i32 - k as i32;
                let v = c * Self::block_lp(&refs, self.d, k, i, p, gamma);
                blocks.push((k, (f64::from(k) * s).exp2() * v));
            }
        }
        let value = lq_aggregate(blocks.iter().map(|b| b.1), q);
        Ok((value, blocks))
    }
}

// ---------------------------------------------------------- radial profiles

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=0.25).contains(&eps) {
        return range(format!("inner cutoff must be in [0, 1/4], got {eps}"));
    }
    Ok(())
}

/// `r^{−(d+γ0)/p0} log(1/r)^{−1/p1}` on `(ε, 1/2]`.
pub fn log_singularity(p0: f64, gamma0: f64, p1: f64, d: u32, eps: f64) -> Result<RadialProfile> {
    log_profile(p0, gamma0, p1, d, eps, true)
}

/// Variant with the exponent `−d/p0` regardless of the weight.
pub fn log_singularity_unweighted(p0: f64, gamma0: f64, p1: f64, d: u32, eps: f64) -> Result<RadialProfile> {
    log_profile(p0, gamma0, p1, d, eps, false)
}

fn log_profile(p0: f64, gamma0: f64, p1: f64, d: u32, eps: f64, weighted: bool) -> Result<RadialProfile> {
    if !(p1 >= 1.0 && p1 < p0) {
        return range(format!("need 1 <= p1 < p0, got p0 = {p0}, p1 = {p1}"));
    }
    if !(gamma0 > -f64::from(d)) {
        return range(format!("weight exponent must exceed -d, got {gamma0}"));
    }
    check_eps(eps)?;
    let a = if weighted { (f64::from(d) + gamma0) / p0 } else { f64::from(d) / p0 };
    RadialProfile::power_log(d, a, 1.0 / p1, 0.5, eps)
}

/// `r^{−a} log(1/r)^{−b}` on `(ε, 1/2]`.
pub fn riesz_log(a: f64, b: f64, d: u32, eps: f64) -> Result<RadialProfile> {
    check_eps(eps)?;
    RadialProfile::power_log(d, a, b, 0.5, eps)
}

/// Profile family over a list of cutoffs.
pub fn profile_family<T: Real>(kind: WitnessKind, prof: RadialProfile, eps_values: &[f64]) -> Result<WitnessFamily<T>> {
    for &e in eps_values {
        check_eps(e)?;
    }
    let p = prof.clone();
    Ok(WitnessFamily {
        kind,
        parameters: serde_json::to_value(&prof)?,
        values: eps_values.to_vec(),
        generator: Arc::new(move |eps| Ok(Member::Profile(p.with_cutoff(eps)))),
    })
}

// ------------------------------------------------------------ random bases

/// Ratio of truncation radius to Gaussian width in [`random_band_limited`].
const GAUSS_CUT: f64 = 9.0;

/// Random smooth field with Gaussian-type decay in space and spectrum cut at `band`:
/// `f̂(ξ) = e^{−|ξ|²/(2β²)} P(ξ/β) e^{−iξ·x0}`, `β = band/9`, `P` a random cubic.
pub fn random_band_limited<T: Real>(grid: &Grid<T>, band: f64, seed: u64) -> Result<Field<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = band / GAUSS_CUT;
    let d = grid.d() as usize;
    let mut monomials = Vec::new();
    for a in 0..=3u32 {
        for b in 0..=(if d == 2 { 3 - a } else { 0 }) {
            let c = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            monomials.push((a, b, c));
        }
    }
    // keep the constant term dominant so the field is not nearly zero
    monomials[0].2 += Complex::new(2.0, 0.0);
    let shift: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Field::from_fourier(grid, Some(T::lit(band)), |xi| {
        let x: Vec<f64> = xi.iter().map(|v| v.as_f64() / beta).collect();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let poly: Complex<f64> = monomials
            .iter()
            .map(|&(a, b, c)| c * x[0].powi(a as i32) * if d == 2 { x[1].powi(b as i32) } else { 1.0 })
            .sum();
        let phase: f64 = xi.iter().zip(&shift).map(|(v, s)| -v.as_f64() * s).sum();
        let v = poly * (-r2 / 2.0).exp() * Complex::new(0.0, phase).exp();
        Complex::new(T::lit(v.re), T::lit(v.im))
    })
}

/// Random field spread over the first `blocks` dyadic blocks:
/// `f̂ = Σ_k a_k φ̂_k(ξ) (1 + b_k ξ_1/2^k) e^{−iξ·x_k}` with uniform random `a_k, b_k, x_k`.
pub fn random_block_field<T: Real>(grid: &Grid<T>, blocks: u32, seed: u64) -> Result<Field<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.d() as usize;
    let terms: Vec<(Complex<f64>, f64, Vec<f64>)> = (0..blocks)
        .map(|_| {
            let a = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b = rng.gen_range(-0.5..0.5);
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (a, b, x)
        })
        .collect();
    let band = DyadicSystem::<T>::band(blocks.saturating_sub(1));
    Field::from_fourier(grid, Some(T::lit(band)), |xi| {
        let xs: Vec<f64> = xi.iter().map(|v| v.as_f64()).collect();
        let r = xs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let v: Complex<f64> = terms
            .iter()
            .enumerate()
            .map(|(k, (a, b, x))| {
                let phi = crate::lpengine::phi_hat(k as u32, r);
                if phi == 0.0 {
                    return Complex::new(0.0, 0.0);
                }
                let ph: f64 = xs.iter().zip(x).map(|(u, s)| -u * s).sum();
                a * phi * (1.0 + b * xs[0] / f64::from(k as u32).exp2()) * Complex::new(0.0, ph).exp()
            })
            .sum();
        Complex::new(T::lit(v.re), T::lit(v.im))
    })
}

fn grid_json<T: Real>(g: &Grid<T>) -> Value {
    json!({ "d": g.d(), "L": g.l().as_f64(), "N": g.n() })
}

trait DivideF64 {
    fn divide_f64(&self, num: f64) -> f64;
}

impl DivideF64 for Extended<f64> {
    fn divide_f64(&self, num: f64) -> f64 {
        match self {
            Extended::Finite(p) => num / p,
            Extended::Infinite => 0.0,
        }
    }
}
