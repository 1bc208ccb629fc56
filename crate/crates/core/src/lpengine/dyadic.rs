use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use super::field::Field;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn chi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth radial generator: `1` on `|ξ| ≤ 1`, `0` on `|ξ| ≥ 3/2`, monotone in between.
pub fn phi_hat0(r: f64) -> f64 {
    let a = chi(1.5 - r);
    if a == 0.0 {
        return 0.0;
    }
    let b = chi(r - 1.0);
    a / (a + b)
}

/// `φ̂_k(r)` for `k ≥ 0` at radius `r = |ξ|`.
pub fn phi_hat(k: u32, r: f64) -> f64 {
    if k == 0 {
        phi_hat0(r)
    } else {
        let s = (-(k as i32) as f64).exp2();
        phi_hat0(s * r) - phi_hat0(2.0 * s * r)
    }
}

/// Dyadic partition of unity sampled on a grid's frequency lattice.
#[derive(Clone)]
pub struct DyadicSystem<T: Real> {
    grid: Grid<T>,
    k_max: u32,
    tables: Vec<Arc<Vec<T>>>,
}

impl<T: Real> std::fmt::Debug for DyadicSystem<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DyadicSystem({:?}, K={})", self.grid, self.k_max)
    }
}

/// Number of the last block that can be nonzero on `grid`.
pub fn block_count<T: Real>(grid: &Grid<T>) -> u32 {
    let reach = grid.xi_max().as_f64() * f64::from(grid.d()).sqrt();
    (reach.log2().ceil().max(0.0) as u32) + 1
}

pub fn make_dyadic<T: Real>(grid: &Grid<T>) -> DyadicSystem<T> {
    let k_max = block_count(grid);
    let tables = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            Arc::new(
                (0..grid.len())
                    .map(|idx| T::lit(phi_hat(k, grid.freq_norm(idx).as_f64())))
                    .collect::<Vec<T>>(),
            )
        })
        .collect();
    DyadicSystem { grid: grid.clone(), k_max, tables }
}

impl<T: Real> DyadicSystem<T> {
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Index of the last block, `K`.
    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn hat_phi(&self, k: u32) -> &[T] {
        &self.tables[k as usize]
    }

    /// Outer radius of the support of block `k`.
    pub fn band(k: u32) -> f64 {
        1.5 * f64::from(k).exp2()
    }

    /// Inner radius of the support of block `k ≥ 1` (0 for `k = 0`).
    pub fn inner(k: u32) -> f64 {
        if k == 0 {
            0.0
        } else {
            f64::from(k - 1).exp2()
        }
    }

    fn check(&self, f: &Field<T>) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `S_k f`.
    pub fn block(&self, f: &Field<T>, k: u32) -> Result<Field<T>> {
        self.check(f)?;
        if k > self.k_max {
            return Ok(Field::zeros(&self.grid));
        }
        Ok(f.apply_table(self.hat_phi(k), Some(T::lit(Self::band(k)))))
    }

    /// Indices of blocks that can be nonzero for `f`, from its band limit if set.
    pub fn active_blocks(&self, f: &Field<T>) -> Vec<u32> {
        let top = match f.band_limit() {
            Some(b) => {
                let b = b.as_f64();
                (0..=self.k_max).take_while(|&k| Self::inner(k) < b).last().unwrap_or(0)
            }
            None => self.k_max,
        };
        (0..=top).collect()
    }
}

/// `S_0 f, …, S_K f`.
pub fn lp_blocks<T: Real>(f: &Field<T>, sys: &DyadicSystem<T>) -> Result<Vec<Field<T>>> {
    sys.check(f)?;
    f.spectrum();
    (0..=sys.k_max()).into_par_iter().map(|k| sys.block(f, k)).collect()
}

/// Bessel potential `J_s`: multiplier `(1+|ξ|²)^{s/2}`.
pub fn bessel_apply<T: Real>(f: &Field<T>, s: T) -> Field<T> {
    if s == T::zero() {
        return f.clone();
    }
    let half = s / T::lit(2.0);
    f.apply_multiplier(|xi| {
        let r2: T = xi.iter().map(|&x| x * x).sum();
        Complex::new((T::one() + r2).powf(half), T::zero())
    })
}

/// Spectral derivative `D^α`: multiplier `Π (iξ_j)^{α_j}`.
pub fn derivative<T: Real>(f: &Field<T>, alpha: &[u32]) -> Result<Field<T>> {
    if alpha.len() != f.grid().d() as usize {
        return Err(Error::DimensionMismatch(alpha.len() as u32, f.grid().d()));
    }
    if alpha.iter().all(|&a| a == 0) {
        return Ok(f.clone());
    }
    let i = Complex::new(T::zero(), T::one());
    Ok(f.apply_multiplier(|xi| {
        alpha
            .iter()
            .zip(xi)
            .fold(Complex::new(T::one(), T::zero()), |acc, (&a, &x)| acc * (i * x).powu(a))
    }))
}

/// All multi-indices `α ∈ N_0^d` with `|α| ≤ m`, `d ∈ {1, 2}`.
pub fn multi_indices(d: u32, m: u32) -> Vec<Vec<u32>> {
    if d == 1 {
        return (0..=m).map(|a| vec![a]).collect();
    }
    (0..=m).flat_map(|total| (0..=total).map(move |a| vec![a, total - a])).collect()
}
