//! Weighted Besov, Triebel–Lizorkin, Bessel-potential and Sobolev norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{range, Error, Result};
use crate::lpengine::quad::{effective_band, refinement_for};
use crate::lpengine::{
    bessel_apply, derivative, make_dyadic, multi_indices, weighted_lp, weighted_lp_samples, DyadicSystem, Field,
    Grid,
};
use crate::params::{Extended, Family, SpaceSpec};
use crate::scalar::{Real, Scalar};

/// Relative boundary magnitude above which a periodization warning is attached.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    /// `(k, 2^{ks} ‖S_k f‖_{L^p(w)})` for Besov norms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_block: Option<Vec<(u32, f64)>>,
    pub warnings: Vec<Warning>,
}

impl NormResult {
    fn plain(value: f64, warnings: Vec<Warning>) -> Self {
        NormResult { value, per_block: None, warnings }
    }
}

/// `ℓ^q` norm of nonnegative entries; `q = ∞` is the maximum.
pub fn lq_aggregate(values: impl IntoIterator<Item = f64>, q: Extended<f64>) -> f64 {
    match q {
        Extended::Infinite => values.into_iter().fold(0.0, f64::max),
        Extended::Finite(q) => {
            let v: Vec<f64> = values.into_iter().collect();
            let peak = v.iter().cloned().fold(0.0, f64::max);
            if peak == 0.0 {
                return 0.0;
            }
            peak * v.iter().map(|x| (x / peak).powf(q)).sum::<f64>().powf(1.0 / q)
        }
    }
}

fn check_q(q: Extended<f64>) -> Result<()> {
    if let Extended::Finite(v) = q {
        if !(v >= 1.0) {
            return range(format!("q must be in [1, inf], got {v}"));
        }
    }
    Ok(())
}

fn finite_p(p: Extended<f64>, what: &str) -> Result<f64> {
    match p {
        Extended::Finite(v) => Ok(v),
        Extended::Infinite => range(format!("{what} norm needs p < inf")),
    }
}

/// Norm evaluator bound to one grid and its dyadic system.
#[derive(Clone, Debug)]
pub struct Analyzer<T: Real> {
    sys: DyadicSystem<T>,
}

impl<T: Real> Analyzer<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        Analyzer { sys: make_dyadic(grid) }
    }

    pub fn from_system(sys: DyadicSystem<T>) -> Self {
        Analyzer { sys }
    }

    pub fn system(&self) -> &DyadicSystem<T> {
        &self.sys
    }

    pub fn grid(&self) -> &Grid<T> {
        self.sys.grid()
    }

    fn check(&self, f: &Field<T>) -> Result<()> {
        if f.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Warnings about periodization and resolution for `f`.
    pub fn diagnose(&self, f: &Field<T>) -> Vec<Warning> {
        let mut out = Vec::new();
        let peak = f.max_abs().as_f64();
        let edge = f.boundary_max().as_f64();
        if peak > 0.0 && edge > BOUNDARY_TOL * peak {
            out.push(Warning {
                code: "boundary".into(),
                message: format!("|f| reaches {edge:.3e} (relative {:.3e}) on the torus boundary", edge / peak),
            });
        }
        let band = effective_band(f);
        if band >= 0.9 * self.grid().xi_max().as_f64() {
            out.push(Warning {
                code: "unresolved".into(),
                message: format!("spectrum reaches {band:.3e}, near the Nyquist limit"),
            });
        }
        out
    }

    /// Nonzero dyadic blocks `(k, S_k f)`.
    pub fn blocks(&self, f: &Field<T>) -> Result<Vec<(u32, Field<T>)>> {
        self.check(f)?;
        f.spectrum();
        self.sys
            .active_blocks(f)
            .into_par_iter()
            .map(|k| Ok((k, self.sys.block(f, k)?)))
            .collect()
    }

    pub fn lp_norm(&self, f: &Field<T>, p: Extended<f64>, gamma: f64) -> Result<NormResult> {
        self.check(f)?;
        Ok(NormResult::plain(weighted_lp(f, p, gamma)?.as_f64(), self.diagnose(f)))
    }

    /// Blocks resampled onto a common lattice that resolves the highest one.
    fn fine_blocks(&self, f: &Field<T>) -> Result<(Grid<T>, Vec<(u32, Field<T>)>)> {
        let blocks = self.blocks(f)?;
        let band = effective_band(f).min(DyadicSystem::<T>::band(blocks.last().map(|b| b.0).unwrap_or(0)));
        let factor = refinement_for(self.grid(), band);
        let fine = blocks
            .into_par_iter()
            .map(|(k, b)| Ok((k, b.upsample(factor)?)))
            .collect::<Result<_>>()?;
        Ok((self.grid().refined(factor)?, fine))
    }

    pub fn besov_norm(&self, f: &Field<T>, s: f64, p: Extended<f64>, q: Extended<f64>, gamma: f64) -> Result<NormResult> {
        check_q(q)?;
        let (fine_grid, fine) = self.fine_blocks(f)?;
        let per_block: Vec<(u32, f64)> = fine
            .par_iter()
            .map(|(k, b)| {
                let g: Vec<T> = b.values().iter().map(|v| v.norm()).collect();
                let v = weighted_lp_samples(&fine_grid, &g, p, gamma)?.as_f64();
                Ok((*k, (f64::from(*k) * s).exp2() * v))
            })
            .collect::<Result<_>>()?;
        let value = lq_aggregate(per_block.iter().map(|x| x.1), q);
        Ok(NormResult { value, per_block: Some(per_block), warnings: self.diagnose(f) })
    }

    pub fn triebel_norm(&self, f: &Field<T>, s: f64, p: Extended<f64>, q: Extended<f64>, gamma: f64) -> Result<NormResult> {
        check_q(q)?;
        let pf = finite_p(p, "Triebel-Lizorkin")?;
        let (fine_grid, fine) = self.fine_blocks(f)?;
        let g: Vec<T> = (0..fine_grid.len())
            .into_par_iter()
            .map(|i| {
                let terms = fine.iter().map(|(k, b)| (f64::from(*k) * s).exp2() * b.values()[i].norm().as_f64());
                T::lit(lq_aggregate(terms, q))
            })
            .collect();
        let value = weighted_lp_samples(&fine_grid, &g, Extended::Finite(pf), gamma)?.as_f64();
        Ok(NormResult::plain(value, self.diagnose(f)))
    }

    pub fn bessel_norm(&self, f: &Field<T>, s: f64, p: Extended<f64>, gamma: f64) -> Result<NormResult> {
        self.check(f)?;
        let p = Extended::Finite(finite_p(p, "Bessel-potential")?);
        let j = bessel_apply(f, T::lit(s));
        Ok(NormResult::plain(weighted_lp(&j, p, gamma)?.as_f64(), self.diagnose(f)))
    }

    pub fn sobolev_norm(&self, f: &Field<T>, m: u32, p: Extended<f64>, gamma: f64) -> Result<NormResult> {
        self.check(f)?;
        let p = Extended::Finite(finite_p(p, "Sobolev")?);
        let value = multi_indices(self.grid().d(), m)
            .into_par_iter()
            .map(|alpha| Ok(weighted_lp(&derivative(f, &alpha)?, p, gamma)?.as_f64()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .sum();
        Ok(NormResult::plain(value, self.diagnose(f)))
    }

    /// Norm of the space described by `spec`. Hölder–Zygmund targets use the
    /// `B^s_{∞,∞}` norm; `L^p` is the weighted Lebesgue norm.
    pub fn space_norm<S: Scalar>(&self, f: &Field<T>, spec: &SpaceSpec<S>) -> Result<NormResult> {
        if spec.d != self.grid().d() {
            return Err(Error::DimensionMismatch(spec.d, self.grid().d()));
        }
        let sf = spec.to_f64();
        let (s, p, gamma) = (sf.s, sf.p, sf.gamma);
        let q = sf.q.unwrap_or(Extended::Infinite);
        match spec.family {
            Family::Besov => self.besov_norm(f, s, p, q, gamma),
            Family::TriebelLizorkin => self.triebel_norm(f, s, p, q, gamma),
            Family::BesselPotential if s == 0.0 => self.lp_norm(f, p, gamma),
            Family::BesselPotential => self.bessel_norm(f, s, p, gamma),
            Family::Lebesgue => self.lp_norm(f, p, gamma),
            Family::Sobolev => {
                if !spec.s.is_integral() {
                    return self.besov_norm(f, s, p, p, gamma);
                }
                self.sobolev_norm(f, s.round() as u32, p, gamma)
            }
            Family::Holder => self.besov_norm(f, s, Extended::Infinite, Extended::Infinite, 0.0),
        }
    }
}

pub fn besov_norm<T: Real>(f: &Field<T>, s: f64, p: Extended<f64>, q: Extended<f64>, gamma: f64) -> Result<NormResult> {
    Analyzer::new(f.grid()).besov_norm(f, s, p, q, gamma)
}

pub fn triebel_norm<T: Real>(f: &Field<T>, s: f64, p: Extended<f64>, q: Extended<f64>, gamma: f64) -> Result<NormResult> {
    Analyzer::new(f.grid()).triebel_norm(f, s, p, q, gamma)
}

pub fn bessel_norm<T: Real>(f: &Field<T>, s: f64, p: Extended<f64>, gamma: f64) -> Result<NormResult> {
    Analyzer::new(f.grid()).bessel_norm(f, s, p, gamma)
}

pub fn sobolev_norm<T: Real>(f: &Field<T>, m: u32, p: Extended<f64>, gamma: f64) -> Result<NormResult> {
    Analyzer::new(f.grid()).sobolev_norm(f, m, p, gamma)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_relative_eq;
    use num_complex::Complex;

    use super::*;

    fn fin(v: f64) -> Extended<f64> {
        Extended::Finite(v)
    }

    fn grid() -> Grid<f64> {
        Grid::new(1, 16.0, 2048).unwrap()
    }

    /// Smooth packet whose spectrum sits in `[(3/4)2^n, 2^n]`, so one block carries it.
    fn packet(g: &Grid<f64>, n: u32) -> Field<f64> {
        let lo = 0.75 * f64::from(n).exp2();
        let hi = f64::from(n).exp2();
        let (c, w) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        Field::from_fourier(g, Some(hi), move |xi| {
            let t = (xi[0] - c).abs() / w;
            Complex::new(crate::lpengine::phi_hat0(1.5 * t), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn single_block_besov_equals_scaled_lp() {
        let g = grid();
        let a = Analyzer::new(&g);
        let f = packet(&g, 4);
        let lp = weighted_lp(&f, fin(2.0), 0.5).unwrap();
        for q in [fin(1.0), fin(2.0), Extended::Infinite] {
            let b = a.besov_norm(&f, 1.5, fin(2.0), q, 0.5).unwrap();
            assert_relative_eq!(b.value, 2f64.powf(4.0 * 1.5) * lp, max_relative = 1e-10);
            let t = a.triebel_norm(&f, 1.5, fin(2.0), q, 0.5).unwrap();
            assert_relative_eq!(t.value, b.value, max_relative = 1e-6);
        }
    }

    #[test]
    fn low_band_besov_is_lp() {
        let g = grid();
        let f = Field::from_fourier(&g, Some(1.0), |xi| Complex::new((-xi[0] * xi[0]).exp(), 0.0)).unwrap();
        let b = besov_norm(&f, 0.0, fin(3.0), fin(1.0), 1.0).unwrap();
        assert_relative_eq!(b.value, weighted_lp(&f, fin(3.0), 1.0).unwrap(), max_relative = 1e-14);
    }

    fn wide(g: &Grid<f64>) -> Field<f64> {
        Field::from_fourier(g, Some(40.0), |xi| {
            let x = xi[0];
            Complex::new(crate::lpengine::phi_hat0(x.abs() / 26.0) * (1.0 + (0.3 * x).sin()), 0.2 * x.cos())
        })
        .unwrap()
    }

    #[test]
    fn besov_q_monotone_and_f_equals_b_at_q_p() {
        let g = grid();
        let a = Analyzer::new(&g);
        let f = wide(&g);
        let mut last = f64::INFINITY;
        for q in [fin(1.0), fin(1.5), fin(2.0), fin(4.0), Extended::Infinite] {
            let v = a.besov_norm(&f, 0.5, fin(2.0), q, 0.5).unwrap().value;
            assert!(v <= last * (1.0 + 1e-12));
            last = v;
        }
        for p in [1.5, 2.0, 3.0] {
            let b = a.besov_norm(&f, 0.7, fin(p), fin(p), 0.5).unwrap().value;
            let t = a.triebel_norm(&f, 0.7, fin(p), fin(p), 0.5).unwrap().value;
            assert_relative_eq!(b, t, max_relative = 1e-6);
        }
    }

    #[test]
    fn bessel_and_sobolev_basics() {
        let g = grid();
        let a = Analyzer::new(&g);
        let f = wide(&g);
        let lp = weighted_lp(&f, fin(2.0), 0.5).unwrap();
        assert_relative_eq!(a.bessel_norm(&f, 0.0, fin(2.0), 0.5).unwrap().value, lp, max_relative = 1e-14);
        assert_relative_eq!(a.sobolev_norm(&f, 0, fin(2.0), 0.5).unwrap().value, lp, max_relative = 1e-14);
        let lifted = bessel_apply(&f, -0.8);
        assert_relative_eq!(
            a.bessel_norm(&lifted, 2.0, fin(2.0), 0.5).unwrap().value,
            a.bessel_norm(&f, 1.2, fin(2.0), 0.5).unwrap().value,
            max_relative = 1e-10
        );
    }

    #[test]
    fn sobolev_of_sine() {
        // on a full period, ‖sin ωx‖_2 = ‖ω cos ωx‖_2 / ω = √L
        let g = Grid::<f64>::new(1, PI, 256).unwrap();
        let omega = 5.0;
        let f = Field::from_real_fn(&g, |x| (omega * x[0]).sin());
        let v = sobolev_norm(&f, 1, fin(2.0), 0.0).unwrap().value;
        assert_relative_eq!(v, (1.0 + omega) * PI.sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn homogeneity_and_zero() {
        let g = grid();
        let a = Analyzer::new(&g);
        let f = wide(&g);
        let v = a.triebel_norm(&f, 1.0, fin(2.0), fin(1.0), 0.0).unwrap().value;
        let w = a.triebel_norm(&f.scale(-3.0), 1.0, fin(2.0), fin(1.0), 0.0).unwrap().value;
        assert_relative_eq!(w, 3.0 * v, max_relative = 1e-12);
        let z = Field::zeros(&g);
        assert_eq!(a.besov_norm(&z, 1.0, fin(2.0), fin(2.0), 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn boundary_warning() {
        let g = Grid::<f64>::new(1, 4.0, 64).unwrap();
        let f = Field::from_real_fn(&g, |_| 1.0);
        let r = besov_norm(&f, 0.0, fin(2.0), fin(2.0), 0.0).unwrap();
        assert!(r.warnings.iter().any(|w| w.code == "boundary"));
        assert!(triebel_norm(&f, 0.0, Extended::Infinite, fin(2.0), 0.0).is_err());
    }
}
