use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rayon::prelude::*;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex samples on a [`Grid`] with a lazily computed DFT.
///
/// `spectrum()[k]` is the unnormalized DFT `Σ_j f(x_j) e^{−2πi jk/N}`; the
/// continuous transform `f̂(ξ) = ∫ f(x) e^{−ixξ} dx` at lattice frequency
/// `ξ_k` is `h^d (−1)^{k'} spectrum()[k]` for signed index `k'`.
pub struct Field<T: Real> {
    grid: Grid<T>,
    values: Arc<Vec<Complex<T>>>,
    spectrum: OnceLock<Arc<Vec<Complex<T>>>>,
    band_limit: Option<T>,
}

impl<T: Real> Clone for Field<T> {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Field { grid: self.grid.clone(), values: self.values.clone(), spectrum, band_limit: self.band_limit }
    }
}

impl<T: Real> std::fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Field({:?}, band_limit={:?})", self.grid, self.band_limit.map(|b| b.as_f64()))
    }
}

fn sign_factor(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl<T: Real> Field<T> {
    pub fn from_values(grid: &Grid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Range(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field { grid: grid.clone(), values: Arc::new(values), spectrum: OnceLock::new(), band_limit: None })
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Field::from_values(grid, vec![Complex::new(T::zero(), T::zero()); grid.len()]).expect("sized")
    }

    /// Sample `f` at every grid point. `f` receives the coordinates (length `d`).
    pub fn from_fn(grid: &Grid<T>, f: impl Fn(&[T]) -> Complex<T> + Sync) -> Self {
        let d = grid.d() as usize;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(&grid.point(idx)[..d]))
            .collect();
        Field::from_values(grid, values).expect("sized")
    }

    pub fn from_real_fn(grid: &Grid<T>, f: impl Fn(&[T]) -> T + Sync) -> Self {
        Field::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    /// Field whose continuous Fourier transform is `fhat` on the lattice,
    /// truncated to `|ξ| ≤ band_limit` when given:
    /// `f(x) = (2π)^{−d} Σ_k fhat(ξ_k) e^{iξ_k x} (π/L)^d`.
    pub fn from_fourier(
        grid: &Grid<T>,
        band_limit: Option<T>,
        fhat: impl Fn(&[T]) -> Complex<T> + Sync,
    ) -> Result<Self> {
        if let Some(b) = band_limit {
            check_nyquist(grid, b)?;
        }
        let d = grid.d() as usize;
        let h_d = grid.h().powi(grid.d() as i32);
        let spectrum: Vec<Complex<T>> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                if let Some(b) = band_limit {
                    if grid.freq_norm(idx) > b {
                        return Complex::new(T::zero(), T::zero());
                    }
                }
                let [i, j] = grid.split(idx);
                let mut sign = sign_factor(grid.signed(i));
                if d == 2 {
                    sign *= sign_factor(grid.signed(j));
                }
                fhat(&grid.freq(idx)[..d]) * (T::lit(sign) / h_d)
            })
            .collect();
        Field::from_spectrum(grid, spectrum, band_limit)
    }

    /// Field from raw DFT coefficients.
    pub fn from_spectrum(grid: &Grid<T>, spectrum: Vec<Complex<T>>, band_limit: Option<T>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::Range(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                spectrum.len()
            )));
        }
        let mut values = spectrum.clone();
        grid.inverse(&mut values);
        let out = Field {
            grid: grid.clone(),
            values: Arc::new(values),
            spectrum: OnceLock::new(),
            band_limit,
        };
        let _ = out.spectrum.set(Arc::new(spectrum));
        Ok(out)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn band_limit(&self) -> Option<T> {
        self.band_limit
    }

    pub fn spectrum(&self) -> &[Complex<T>] {
        self.spectrum.get_or_init(|| {
            let mut buf = (*self.values).clone();
            self.grid.forward(&mut buf);
            Arc::new(buf)
        })
    }

    /// Continuous Fourier transform `f̂(ξ_k)` at flat lattice index `idx`.
    pub fn fourier_at(&self, idx: usize) -> Complex<T> {
        let [i, j] = self.grid.split(idx);
        let mut sign = sign_factor(self.grid.signed(i));
        if self.grid.d() == 2 {
            sign *= sign_factor(self.grid.signed(j));
        }
        self.spectrum()[idx] * (T::lit(sign) * self.grid.h().powi(self.grid.d() as i32))
    }

    /// Zero every coefficient with `|ξ| > radius` and record the band limit.
    pub fn with_band_limit(&self, radius: T) -> Field<T> {
        let grid = &self.grid;
        let spec: Vec<Complex<T>> = self
            .spectrum()
            .par_iter()
            .enumerate()
            .map(|(idx, c)| if grid.freq_norm(idx) > radius { Complex::new(T::zero(), T::zero()) } else { *c })
            .collect();
        let band = match self.band_limit {
            Some(b) if b < radius => b,
            _ => radius,
        };
        Field::from_spectrum(grid, spec, Some(band)).expect("sized")
    }

    /// Largest `|ξ|` carrying a coefficient above `tol` relative to the peak.
    pub fn spectral_radius(&self, tol: T) -> T {
        let spec = self.spectrum();
        let peak = spec.iter().map(|c| c.norm()).fold(T::zero(), T::max);
        spec.iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > tol * peak)
            .map(|(idx, _)| self.grid.freq_norm(idx))
            .fold(T::zero(), T::max)
    }

    /// Diagonal Fourier multiplier `m(ξ)`.
    pub fn apply_multiplier(&self, m: impl Fn(&[T]) -> Complex<T> + Sync) -> Field<T> {
        let grid = &self.grid;
        let d = grid.d() as usize;
        let spec: Vec<Complex<T>> = self
            .spectrum()
            .par_iter()
            .enumerate()
            .map(|(idx, c)| {
                if c.re == T::zero() && c.im == T::zero() {
                    *c
                } else {
                    *c * m(&grid.freq(idx)[..d])
                }
            })
            .collect();
        Field::from_spectrum(grid, spec, self.band_limit).expect("sized")
    }

    /// Real-valued multiplier given per flat index (e.g. a dyadic cutoff).
    pub fn apply_table(&self, table: &[T], band_limit: Option<T>) -> Field<T> {
        let spec: Vec<Complex<T>> = self
            .spectrum()
            .par_iter()
            .zip(table.par_iter())
            .map(|(c, m)| *c * *m)
            .collect();
        let band = match (self.band_limit, band_limit) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Field::from_spectrum(&self.grid, spec, band).expect("sized")
    }

    pub fn scale(&self, c: T) -> Field<T> {
        let values = self.values.par_iter().map(|v| *v * c).collect();
        let mut out = Field::from_values(&self.grid, values).expect("sized");
        out.band_limit = self.band_limit;
        out
    }

    pub fn add(&self, other: &Field<T>) -> Result<Field<T>> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.par_iter().zip(other.values.par_iter()).map(|(a, b)| *a + *b).collect();
        let mut out = Field::from_values(&self.grid, values)?;
        out.band_limit = match (self.band_limit, other.band_limit) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Ok(out)
    }

    pub fn max_abs(&self) -> T {
        self.values.par_iter().map(|v| v.norm()).reduce(T::zero, T::max)
    }

    /// Largest `|f|` on the outermost layer of samples.
    pub fn boundary_max(&self) -> T {
        let n = self.grid.n();
        let d = self.grid.d();
        (0..self.grid.len())
            .filter(|&idx| {
                let [i, j] = self.grid.split(idx);
                i == 0 || i == n - 1 || (d == 2 && (j == 0 || j == n - 1))
            })
            .map(|idx| self.values[idx].norm())
            .fold(T::zero(), T::max)
    }

    /// Largest `|x|` where `|f| > tol · max|f|`.
    pub fn effective_radius(&self, tol: T) -> T {
        let cut = tol * self.max_abs();
        (0..self.grid.len())
            .filter(|&idx| self.values[idx].norm() > cut)
            .map(|idx| {
                let [a, b] = self.grid.point(idx);
                (a * a + b * b).sqrt()
            })
            .fold(T::zero(), T::max)
    }

    /// Max deviation between the cached spectrum and a fresh transform.
    pub fn spectrum_consistency(&self) -> T {
        let mut fresh = (*self.values).clone();
        self.grid.forward(&mut fresh);
        fresh
            .iter()
            .zip(self.spectrum())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Trigonometric interpolant at an arbitrary point.
    pub fn eval_at(&self, x: &[T]) -> Complex<T> {
        let grid = &self.grid;
        let spec = self.spectrum();
        let l = grid.l();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (idx, c) in spec.iter().enumerate() {
            if c.re == T::zero() && c.im == T::zero() {
                continue;
            }
            let xi = grid.freq(idx);
            let mut phase = xi[0] * (x[0] + l);
            if grid.d() == 2 {
                phase = phase + xi[1] * (x[1] + l);
            }
            acc = acc + *c * Complex::new(phase.cos(), phase.sin());
        }
        acc / T::lit(grid.len() as f64)
    }

    /// Exact resampling onto a grid with `factor` times more samples per axis
    /// (zero padding in frequency). Requires no energy at the Nyquist bin.
    pub fn upsample(&self, factor: usize) -> Result<Field<T>> {
        if factor == 1 {
            return Ok(self.clone());
        }
        let fine = self.grid.refined(factor)?;
        let n = self.grid.n();
        let nf = fine.n();
        let map = |k: usize| -> usize {
            let s = self.grid.signed(k);
            if s >= 0 {
                s as usize
            } else {
                (nf as i64 + s) as usize
            }
        };
        let scale = T::lit((fine.len() / self.grid.len()) as f64);
        let mut spec = vec![Complex::new(T::zero(), T::zero()); fine.len()];
        let src = self.spectrum();
        if self.grid.d() == 1 {
            for k in 0..n {
                spec[map(k)] = src[k] * scale;
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    spec[map(i) * nf + map(j)] = src[i * n + j] * scale;
                }
            }
        }
        Field::from_spectrum(&fine, spec, self.band_limit)
    }

    pub(crate) fn set_band_limit(&mut self, band: Option<T>) {
        self.band_limit = band;
    }
}

pub(crate) fn check_nyquist<T: Real>(grid: &Grid<T>, band: T) -> Result<()> {
    if band >= grid.xi_max() {
        return Err(Error::Nyquist { requested: band.as_f64(), available: grid.xi_max().as_f64() });
    }
    Ok(())
}
