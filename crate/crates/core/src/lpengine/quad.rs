//! Weighted `L^p` quadrature with power weights `|x|^γ`.
//!
//! Samples are combined with per-point weights obtained by integrating the
//! local quadratic interpolant of the integrand against `|x|^γ` on the cell
//! centred at each lattice point (product integration). For `γ = 0` this is the
//! periodic trapezoid rule. Fields are first resampled onto a finer lattice so
//! that their band is resolved by at least `SAMPLES_PER_WAVE` points.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use super::field::Field;
use super::grid::Grid;
use crate::error::{range, Result};
use crate::params::Extended;
use crate::scalar::Real;

const SAMPLES_PER_WAVE: f64 = 12.0;
const MAX_REFINE_1D: usize = 8;
const MAX_REFINE_2D: usize = 2;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn gl(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static GL6: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL8: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        6 => GL6.get_or_init(|| gauss_legendre(6)),
        8 => GL8.get_or_init(|| gauss_legendre(8)),
        _ => GL16.get_or_init(|| gauss_legendre(16)),
    }
}

/// Integral of a smooth function over `[a, b]` with `n`-point Gauss–Legendre.
pub fn integrate_gl(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gl(n);
    let (m, r) = ((a + b) / 2.0, (b - a) / 2.0);
    r * x.iter().zip(w).map(|(&t, &wt)| wt * f(m + r * t)).sum::<f64>()
}

fn binom(k: usize, j: usize) -> f64 {
    match (k, j) {
        (_, 0) => 1.0,
        (k, j) if j == k => 1.0,
        (2, 1) => 2.0,
        _ => unreachable!("moments only up to order 2"),
    }
}

/// `∫_lo^hi (x − c)^k |x|^γ dx` for `k ≤ 2`, exact.
fn moment_exact_1d(lo: f64, hi: f64, c: f64, k: usize, gamma: f64) -> f64 {
    // pieces in y = |x| ≥ 0 with x = sign·y
    let mut pieces = Vec::with_capacity(2);
    if hi > 0.0 {
        pieces.push((1.0, lo.max(0.0), hi));
    }
    if lo < 0.0 {
        pieces.push((-1.0, (-hi).max(0.0), -lo));
    }
    let mut total = 0.0;
    for (sign, u, v) in pieces {
        for j in 0..=k {
            let e = j as f64 + gamma + 1.0;
            let prim = (v.powf(e) - if u > 0.0 { u.powf(e) } else { 0.0 }) / e;
            total += binom(k, j) * f64::powi(sign, j as i32) * (-c).powi((k - j) as i32) * prim;
        }
    }
    total
}

fn moments_1d(xc: f64, h: f64, gamma: f64) -> [f64; 3] {
    let a = h / 2.0;
    if xc.abs() <= 4.0 * h {
        std::array::from_fn(|k| moment_exact_1d(xc - a, xc + a, xc, k, gamma))
    } else {
        std::array::from_fn(|k| integrate_gl(8, xc - a, xc + a, |x| (x - xc).powi(k as i32) * x.abs().powf(gamma)))
    }
}

/// `∫_0^{π/4} cos^{−e}θ sin^{m}θ dθ`.
fn octant_angle(e: f64, m: i32) -> f64 {
    integrate_gl(16, 0.0, PI / 8.0, |t| t.cos().powf(-e) * t.sin().powi(m))
        + integrate_gl(16, PI / 8.0, PI / 4.0, |t| t.cos().powf(-e) * t.sin().powi(m))
}

/// `∫_{[−a,a]²} x^{2i} y^{2j} |x|^γ` in polar coordinates.
fn origin_moment_2d(a: f64, i: i32, j: i32, gamma: f64) -> f64 {
    let e = gamma + (2 * i + 2 * j) as f64 + 2.0;
    let part = |i: i32, j: i32| a.powf(e) / e * octant_angle(e - (2 * i) as f64, 2 * j);
    4.0 * (part(i, j) + part(j, i))
}

fn moments_2d(xc: f64, yc: f64, h: f64, gamma: f64) -> [[f64; 3]; 3] {
    let a = h / 2.0;
    let mut m = [[0.0; 3]; 3];
    let dist = xc.abs().max(yc.abs());
    if dist < h / 4.0 {
        for (ka, ia) in [(0usize, 0i32), (2, 1)] {
            for (kb, ib) in [(0usize, 0i32), (2, 1)] {
                m[ka][kb] = origin_moment_2d(a, ia, ib, gamma);
            }
        }
        return m;
    }
    let (sub, order) = if dist <= 3.0 * h { (4usize, 8usize) } else { (1, 6) };
    let (x, w) = gl(order);
    let sw = h / sub as f64;
    for si in 0..sub {
        for sj in 0..sub {
            let x0 = xc - a + (si as f64 + 0.5) * sw;
            let y0 = yc - a + (sj as f64 + 0.5) * sw;
            for (&tx, &wx) in x.iter().zip(w) {
                let px = x0 + tx * sw / 2.0;
                let dx = px - xc;
                for (&ty, &wy) in x.iter().zip(w) {
                    let py = y0 + ty * sw / 2.0;
                    let dy = py - yc;
                    let val = wx * wy * (sw / 2.0) * (sw / 2.0) * (px * px + py * py).powf(gamma / 2.0);
                    let xs = [1.0, dx, dx * dx];
                    let ys = [1.0, dy, dy * dy];
                    for ka in 0..3 {
                        for kb in 0..3 {
                            m[ka][kb] += val * xs[ka] * ys[kb];
                        }
                    }
                }
            }
        }
    }
    m
}

/// Coefficients of the quadratic Lagrange basis on `{−h, 0, h}` in powers of `t`.
fn lagrange(h: f64) -> [[f64; 3]; 3] {
    [
        [0.0, -1.0 / (2.0 * h), 1.0 / (2.0 * h * h)],
        [1.0, 0.0, -1.0 / (h * h)],
        [0.0, 1.0 / (2.0 * h), 1.0 / (2.0 * h * h)],
    ]
}

/// Per-point quadrature weights for `∫ g(x)|x|^γ dx ≈ Σ_j W_j g(x_j)`.
pub fn point_weights(d: u32, l: f64, n: usize, gamma: f64) -> Vec<f64> {
    let h = 2.0 * l / n as f64;
    let coord = |j: usize| -l + j as f64 * h;
    if gamma == 0.0 {
        return vec![h.powi(d as i32); n.pow(d)];
    }
    let lag = lagrange(h);
    if d == 1 {
        let contrib: Vec<[f64; 3]> = (0..n)
            .into_par_iter()
            .map(|c| {
                let m = moments_1d(coord(c), h, gamma);
                std::array::from_fn(|a| (0..3).map(|k| lag[a][k] * m[k]).sum())
            })
            .collect();
        return (0..n)
            .map(|j| contrib[(j + n - 1) % n][2] + contrib[j][1] + contrib[(j + 1) % n][0])
            .collect();
    }
    let contrib: Vec<[[f64; 3]; 3]> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let m = moments_2d(coord(idx / n), coord(idx % n), h, gamma);
            std::array::from_fn(|a| {
                std::array::from_fn(|b| {
                    let mut s = 0.0;
                    for ka in 0..3 {
                        for kb in 0..3 {
                            s += lag[a][ka] * lag[b][kb] * m[ka][kb];
                        }
                    }
                    s
                })
            })
        })
        .collect();
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let mut s = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    // cell centred at (i + 1 − a, j + 1 − b) sees this point at offset (a−1, b−1)
                    let ci = (i + n + 1 - a) % n;
                    let cj = (j + n + 1 - b) % n;
                    s += contrib[ci * n + cj][a][b];
                }
            }
            s
        })
        .collect()
}

fn check_gamma<T: Real>(grid: &Grid<T>, gamma: f64) -> Result<()> {
    if !(gamma > -f64::from(grid.d())) {
        return range(format!("weight exponent must exceed -d = -{}, got {gamma}", grid.d()));
    }
    Ok(())
}

fn check_p(p: &Extended<f64>) -> Result<()> {
    if let Extended::Finite(v) = p {
        if !(*v >= 1.0) {
            return range(format!("p must be in [1, inf], got {v}"));
        }
    }
    Ok(())
}

const SUM_CHUNK: usize = 4096;

/// `∫ g |x|^γ` for nonnegative samples `g` on `grid`, no resampling.
pub fn weighted_integral<T: Real>(grid: &Grid<T>, g: &[T], gamma: f64) -> Result<T> {
    check_gamma(grid, gamma)?;
    let w = grid.weight_table(T::lit(gamma), || {
        point_weights(grid.d(), grid.l().as_f64(), grid.n(), gamma).into_iter().map(T::lit).collect()
    });
    // fixed chunks summed in order: the result does not depend on the thread count
    let partial: Vec<T> = g
        .par_chunks(SUM_CHUNK)
        .zip(w.par_chunks(SUM_CHUNK))
        .map(|(a, b)| a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y))
        .collect();
    let s = partial.into_iter().fold(T::zero(), |acc, v| acc + v);
    Ok(s.max(T::zero()))
}

/// `‖g‖_{L^p(|x|^γ)}` for samples `g ≥ 0` already resolved on `grid`.
pub fn weighted_lp_samples<T: Real>(grid: &Grid<T>, g: &[T], p: Extended<f64>, gamma: f64) -> Result<T> {
    check_gamma(grid, gamma)?;
    check_p(&p)?;
    match p {
        Extended::Infinite => Ok(g.par_iter().cloned().reduce(T::zero, T::max)),
        Extended::Finite(p) => {
            let pt = T::lit(p);
            let peak = g.par_iter().cloned().reduce(T::zero, T::max);
            if peak == T::zero() {
                return Ok(T::zero());
            }
            // scale out the peak to avoid overflow for large p
            let powed: Vec<T> = g.par_iter().map(|&v| (v / peak).powf(pt)).collect();
            Ok(peak * weighted_integral(grid, &powed, gamma)?.powf(T::one() / pt))
        }
    }
}

/// Refinement factor so that `band` is sampled with enough points per wavelength.
pub fn refinement_for<T: Real>(grid: &Grid<T>, band: f64) -> usize {
    let cap = if grid.d() == 1 { MAX_REFINE_1D } else { MAX_REFINE_2D };
    let h = grid.h().as_f64();
    // a spectrum reaching the Nyquist corner is not resolved; resampling cannot help
    if band >= 0.9 * grid.xi_max().as_f64() {
        return 1;
    }
    let mut factor = 1;
    while factor < cap && band * h / factor as f64 > 2.0 * PI / SAMPLES_PER_WAVE {
        factor *= 2;
    }
    factor
}

/// Effective band of a field: its recorded band limit, else its spectral radius.
pub fn effective_band<T: Real>(f: &Field<T>) -> f64 {
    match f.band_limit() {
        Some(b) => b.as_f64().min(f.spectral_radius(T::lit(1e-13)).as_f64()),
        None => f.spectral_radius(T::lit(1e-13)).as_f64(),
    }
}

/// `‖f‖_{L^p(|x|^γ)}`. `p = ∞` is the grid maximum and ignores the weight.
pub fn weighted_lp<T: Real>(f: &Field<T>, p: Extended<f64>, gamma: f64) -> Result<T> {
    check_gamma(f.grid(), gamma)?;
    check_p(&p)?;
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let factor = refinement_for(f.grid(), effective_band(f));
    let fine = f.upsample(factor)?;
    let g: Vec<T> = fine.values().par_iter().map(|v| v.norm()).collect();
    weighted_lp_samples(fine.grid(), &g, p, gamma)
}

/// Plain sampled sum `(Σ |f(x_j)|^p W_j)^{1/p}` on the native grid (no resampling).
pub fn weighted_lp_native<T: Real>(f: &Field<T>, p: Extended<f64>, gamma: f64) -> Result<T> {
    let g: Vec<T> = f.values().par_iter().map(|v| v.norm()).collect();
    weighted_lp_samples(f.grid(), &g, p, gamma)
}

/// Lattice Parseval sum `((2L)^{−d} Σ_k |f̂(ξ_k)|²)^{1/2} = ‖f‖_{L^2}` for the periodic extension.
pub fn parseval_l2<T: Real>(f: &Field<T>) -> T {
    let n = T::lit(f.grid().len() as f64);
    let vol = (T::lit(2.0) * f.grid().l()).powi(f.grid().d() as i32);
    let s: T = f.spectrum().iter().map(|c| c.norm_sqr()).sum();
    (s * vol / (n * n)).sqrt()
}

/// Surface measure of the unit sphere in `R^d`, `σ_{d−1}`.
pub fn sphere_area(d: u32) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / f64::from(d - 2) * sphere_area(d - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_integrates_polynomials() {
        for n in [6, 8, 16] {
            let v = integrate_gl(n, 0.0, 2.0, |x| x.powi(2 * n as i32 - 1));
            assert_relative_eq!(v, 2f64.powi(2 * n as i32) / (2 * n) as f64, max_relative = 1e-13);
        }
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(4), 2.0 * PI * PI, max_relative = 1e-15);
    }

    #[test]
    fn weights_sum_to_weight_integral() {
        // Σ W_j = ∫_{torus} |x|^γ, since constants are interpolated exactly
        for gamma in [-0.5, 0.5, 1.0, 2.0] {
            let w = point_weights(1, 2.0, 64, gamma);
            let h = 4.0 / 64.0;
            // torus cells cover [−2 − h/2, 2 − h/2)
            let lo: f64 = -2.0 - h / 2.0;
            let hi: f64 = 2.0 - h / 2.0;
            let exact = (lo.abs().powf(gamma + 1.0) + hi.powf(gamma + 1.0)) / (gamma + 1.0);
            assert_relative_eq!(w.iter().sum::<f64>(), exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn origin_cell_polar_matches_tensor() {
        // for γ > 0 the tensor rule is accurate enough to cross-check the polar formula
        let a = 0.5;
        let polar = origin_moment_2d(a, 0, 0, 2.0);
        // ∫∫ (x²+y²) over [−a,a]² = 8a⁴/3
        assert_relative_eq!(polar, 8.0 * a.powi(4) / 3.0, max_relative = 1e-13);
        let polar22 = origin_moment_2d(a, 1, 1, 0.0);
        assert_relative_eq!(polar22, (2.0 * a.powi(3) / 3.0).powi(2), max_relative = 1e-13);
    }
}
