use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{range, Result};
use crate::scalar::Real;

struct GridInner<T: Real> {
    d: u32,
    l: T,
    n: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    /// Cell integrals of `|x|^γ`, keyed by the bit pattern of γ.
    weights: Mutex<HashMap<u64, Arc<Vec<T>>>>,
    refined: Mutex<HashMap<usize, Grid<T>>>,
}

/// Periodic lattice `x_j = −L + j h`, `h = 2L/N`, on `[−L, L)^d`, `d ∈ {1, 2}`.
///
/// Cloning is cheap; FFT plans and weight tables are shared.
#[derive(Clone)]
pub struct Grid<T: Real> {
    inner: Arc<GridInner<T>>,
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid(d={}, L={}, N={})", self.d(), self.l(), self.n())
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.d() == other.d() && self.n() == other.n() && self.l() == other.l())
    }
}

impl<T: Real> Grid<T> {
    pub fn new(d: u32, l: T, n: usize) -> Result<Self> {
        if !(1..=2).contains(&d) {
            return range(format!("grid dimension must be 1 or 2, got {d}"));
        }
        if !(l > T::zero()) {
            return range(format!("half-width L must be positive, got {l}"));
        }
        if n < 4 || !n.is_power_of_two() {
            return range(format!("N must be a power of two >= 4, got {n}"));
        }
        let mut planner = FftPlanner::new();
        Ok(Grid {
            inner: Arc::new(GridInner {
                d,
                l,
                n,
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
                weights: Mutex::new(HashMap::new()),
                refined: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn d(&self) -> u32 {
        self.inner.d
    }
    pub fn l(&self) -> T {
        self.inner.l
    }
    pub fn n(&self) -> usize {
        self.inner.n
    }
    /// Total number of samples, `N^d`.
    pub fn len(&self) -> usize {
        self.n().pow(self.d())
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn h(&self) -> T {
        self.l() * T::lit(2.0) / T::lit(self.n() as f64)
    }
    /// Largest representable frequency per axis, `πN/(2L)`.
    pub fn xi_max(&self) -> T {
        T::PI() * T::lit(self.n() as f64) / (T::lit(2.0) * self.l())
    }
    /// Frequency spacing `π/L`.
    pub fn dxi(&self) -> T {
        T::PI() / self.l()
    }

    pub fn coord(&self, j: usize) -> T {
        -self.l() + T::lit(j as f64) * self.h()
    }

    /// Signed DFT index in `[−N/2, N/2)`.
    pub fn signed(&self, k: usize) -> i64 {
        let n = self.n() as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    pub fn freq1(&self, k: usize) -> T {
        T::lit(self.signed(k) as f64) * self.dxi()
    }

    /// Per-axis indices of a flat index (row-major, first axis slowest).
    pub fn split(&self, idx: usize) -> [usize; 2] {
        if self.d() == 1 {
            [idx, 0]
        } else {
            [idx / self.n(), idx % self.n()]
        }
    }

    pub fn point(&self, idx: usize) -> [T; 2] {
        let [i, j] = self.split(idx);
        if self.d() == 1 {
            [self.coord(i), T::zero()]
        } else {
            [self.coord(i), self.coord(j)]
        }
    }

    pub fn freq(&self, idx: usize) -> [T; 2] {
        let [i, j] = self.split(idx);
        if self.d() == 1 {
            [self.freq1(i), T::zero()]
        } else {
            [self.freq1(i), self.freq1(j)]
        }
    }

    pub fn freq_norm(&self, idx: usize) -> T {
        let [a, b] = self.freq(idx);
        (a * a + b * b).sqrt()
    }

    /// Unnormalized forward DFT in place.
    pub(crate) fn forward(&self, buf: &mut [Complex<T>]) {
        self.transform(buf, &self.inner.fwd);
    }

    /// Inverse DFT in place, normalized by `1/N^d`.
    pub(crate) fn inverse(&self, buf: &mut [Complex<T>]) {
        self.transform(buf, &self.inner.inv);
        let scale = T::one() / T::lit(self.len() as f64);
        buf.par_iter_mut().for_each(|c| *c = *c * scale);
    }

    fn transform(&self, buf: &mut [Complex<T>], plan: &Arc<dyn Fft<T>>) {
        let n = self.n();
        debug_assert_eq!(buf.len(), self.len());
        if self.d() == 1 {
            plan.process(buf);
            return;
        }
        buf.par_chunks_mut(n).for_each(|row| plan.process(row));
        transpose(buf, n);
        buf.par_chunks_mut(n).for_each(|row| plan.process(row));
        transpose(buf, n);
    }

    pub(crate) fn weight_table(&self, gamma: T, build: impl FnOnce() -> Vec<T>) -> Arc<Vec<T>> {
        let key = gamma.as_f64().to_bits();
        if let Some(w) = self.inner.weights.lock().expect("weight cache").get(&key) {
            return w.clone();
        }
        let table = Arc::new(build());
        self.inner
            .weights
            .lock()
            .expect("weight cache")
            .entry(key)
            .or_insert(table)
            .clone()
    }

    /// Same torus with `factor` times as many samples per axis.
    pub fn refined(&self, factor: usize) -> Result<Grid<T>> {
        if factor == 1 {
            return Ok(self.clone());
        }
        if let Some(g) = self.inner.refined.lock().expect("refined cache").get(&factor) {
            return Ok(g.clone());
        }
        let g = Grid::new(self.d(), self.l(), self.n() * factor)?;
        Ok(self
            .inner
            .refined
            .lock()
            .expect("refined cache")
            .entry(factor)
            .or_insert(g)
            .clone())
    }
}

fn transpose<T: Copy>(buf: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}
