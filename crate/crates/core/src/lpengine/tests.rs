use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex;

use super::*;
use crate::params::Extended;

fn fin(p: f64) -> Extended<f64> {
    Extended::Finite(p)
}

fn mode(grid: &Grid<f64>, k: i64) -> Field<f64> {
    let xi = k as f64 * grid.dxi();
    Field::from_fn(grid, move |x| Complex::new(0.0, xi * x[0]).exp())
}

#[test]
fn partition_of_unity() {
    for (d, n) in [(1, 1024), (2, 64)] {
        let grid = Grid::<f64>::new(d, 16.0, n).unwrap();
        let sys = make_dyadic(&grid);
        let cover = f64::from(sys.k_max()).exp2();
        let mut worst: f64 = 0.0;
        for idx in 0..grid.len() {
            if grid.freq_norm(idx) > cover {
                continue;
            }
            let s: f64 = (0..=sys.k_max()).map(|k| sys.hat_phi(k)[idx]).sum();
            worst = worst.max((s - 1.0).abs());
        }
        assert!(worst <= 1e-12, "d={d}: {worst}");
        for k in 0..=sys.k_max() {
            assert!(sys.hat_phi(k).iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
        for idx in 0..grid.len() {
            if grid.freq_norm(idx) <= 1.0 {
                assert_eq!(sys.hat_phi(1)[idx], 0.0);
            }
        }
    }
}

#[test]
fn block_count_covers_nyquist_ball() {
    let grid = Grid::<f64>::new(1, 16.0, 1 << 14).unwrap();
    let sys = make_dyadic(&grid);
    // ξ_max = 1608.5 → K = ceil(log2 1608.5) + 1 = 12
    assert_eq!(sys.k_max(), 12);
    assert!(1.5 * f64::from(sys.k_max() - 1).exp2() > grid.xi_max());
}

#[test]
fn low_band_field_is_block_zero() {
    let grid = Grid::<f64>::new(1, 16.0, 512).unwrap();
    let sys = make_dyadic(&grid);
    let f = Field::from_fourier(&grid, Some(1.0), |xi| Complex::new((-xi[0] * xi[0]).exp(), 0.0)).unwrap();
    let blocks = lp_blocks(&f, &sys).unwrap();
    let diff = blocks[0].values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(diff < 1e-14);
    for b in &blocks[1..] {
        assert!(b.max_abs() < 1e-15);
    }
}

#[test]
fn pure_mode_lands_in_one_block() {
    let grid = Grid::<f64>::new(1, 16.0, 1024).unwrap();
    let sys = make_dyadic(&grid);
    for k in 1..=5u32 {
        // lattice frequency in [(3/4)2^k, 2^k]: ξ = π m / 16
        let target = 0.9 * f64::from(k).exp2();
        let m = (target * 16.0 / PI).round() as i64;
        let xi = m as f64 * grid.dxi();
        assert!(xi >= 0.75 * f64::from(k).exp2() && xi <= f64::from(k).exp2());
        let f = mode(&grid, m);
        let blocks = lp_blocks(&f, &sys).unwrap();
        for (j, b) in blocks.iter().enumerate() {
            let err = if j as u32 == k {
                b.values().iter().zip(f.values()).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max)
            } else {
                b.max_abs()
            };
            assert!(err < 1e-11, "k={k} block {j}: {err}");
        }
    }
}

#[test]
fn blocks_reconstruct_random_field() {
    let grid = Grid::<f64>::new(1, 16.0, 2048).unwrap();
    let sys = make_dyadic(&grid);
    let f = Field::from_fourier(&grid, Some(100.0), |xi| {
        let x = xi[0];
        Complex::new((x * 0.37).sin() * (-x * x / 900.0).exp(), (x * 1.3).cos() / (1.0 + x * x))
    })
    .unwrap();
    let blocks = lp_blocks(&f, &sys).unwrap();
    let mut sum = vec![Complex::new(0.0, 0.0); grid.len()];
    for b in &blocks {
        for (s, v) in sum.iter_mut().zip(b.values()) {
            *s += v;
        }
    }
    let err = sum.iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err <= 1e-10 * f.max_abs().max(1.0), "{err}");
    // supports of blocks two apart are disjoint
    for k in 0..blocks.len().saturating_sub(2) {
        let a = blocks[k].spectrum();
        let b = blocks[k + 2].spectrum();
        assert!(a.iter().zip(b).all(|(x, y)| x.norm() == 0.0 || y.norm() == 0.0));
    }
}

#[test]
fn bessel_potential_rules() {
    let grid = Grid::<f64>::new(2, 8.0, 32).unwrap();
    let f = Field::from_real_fn(&grid, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp());
    let same = bessel_apply(&f, 0.0);
    assert_eq!(same.values(), f.values());
    let a = bessel_apply(&bessel_apply(&f, 0.7), -1.9);
    let b = bessel_apply(&f, -1.2);
    let err = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12);

    let g1 = Grid::<f64>::new(1, 8.0, 64).unwrap();
    let m = mode(&g1, 5);
    let xi = 5.0 * g1.dxi();
    let j = bessel_apply(&m, 1.5);
    let factor = (1.0 + xi * xi).powf(0.75);
    for (a, b) in j.values().iter().zip(m.values()) {
        assert!((a - b * factor).norm() < 1e-12);
    }
}

#[test]
fn spectral_derivatives() {
    let grid = Grid::<f64>::new(1, PI, 64).unwrap();
    let omega = 3.0;
    let f = Field::from_real_fn(&grid, |x| (omega * x[0]).sin());
    assert_eq!(derivative(&f, &[0]).unwrap().values(), f.values());
    let df = derivative(&f, &[1]).unwrap();
    for (i, v) in df.values().iter().enumerate() {
        let x = grid.coord(i);
        assert!((v.re - omega * (omega * x).cos()).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
    }
    let g2 = Grid::<f64>::new(2, PI, 16).unwrap();
    let (k1, k2) = (2.0, -3.0);
    let m = Field::from_fn(&g2, |x| Complex::new(0.0, k1 * x[0] + k2 * x[1]).exp());
    let dm = derivative(&m, &[2, 1]).unwrap();
    let factor = Complex::new(0.0, k1).powu(2) * Complex::new(0.0, k2);
    for (a, b) in dm.values().iter().zip(m.values()) {
        assert!((a - b * factor).norm() < 1e-10);
    }
    assert!(derivative(&m, &[1]).is_err());
}

#[test]
fn indicator_with_linear_weight() {
    let grid = Grid::<f64>::new(1, 2.0, 8192).unwrap();
    let f = Field::from_real_fn(&grid, |x| if (0.0..=1.0).contains(&x[0]) { 1.0 } else { 0.0 });
    let v = weighted_lp(&f, fin(2.0), 1.0).unwrap();
    assert!((v - 0.5f64.sqrt()).abs() < 1e-3, "{v}");
}

#[test]
fn gaussian_norms() {
    let grid = Grid::<f64>::new(1, 8.0, 256).unwrap();
    let f = Field::from_real_fn(&grid, |x| (-x[0] * x[0] / 2.0).exp());
    let v = weighted_lp(&f, fin(2.0), 0.0).unwrap();
    assert!((v - PI.powf(0.25)).abs() < 1e-6, "{v}");
    assert_eq!(weighted_lp(&f, Extended::Infinite, 0.0).unwrap(), f.max_abs());
    assert_eq!(weighted_lp(&f, Extended::Infinite, 1.5).unwrap(), f.max_abs());
    assert!(weighted_lp(&f, fin(2.0), -1.0).is_err());
}

#[test]
fn weighted_gaussian_moments() {
    // ∫ |x|^γ e^{−x²} dx = Γ((γ+1)/2) in d = 1; π Γ(γ/2 + 1) in d = 2
    let grid = Grid::<f64>::new(1, 8.0, 256).unwrap();
    let f = Field::from_real_fn(&grid, |x| (-x[0] * x[0] / 2.0).exp());
    for (gamma, exact) in [(1.0, 1.0), (2.0, PI.sqrt() / 2.0), (-0.5, 3.625_609_908_221_908_3)] {
        let v = weighted_lp(&f, fin(2.0), gamma).unwrap().powi(2);
        assert_relative_eq!(v, exact, max_relative = 1e-4);
    }
    let g2 = Grid::<f64>::new(2, 8.0, 128).unwrap();
    let f2 = Field::from_real_fn(&g2, |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
    for (gamma, exact) in [(1.0, PI * PI.sqrt() / 2.0), (-1.0, PI * PI.sqrt()), (0.0, PI)] {
        let v = weighted_lp(&f2, fin(2.0), gamma).unwrap().powi(2);
        assert_relative_eq!(v, exact, max_relative = 1e-4);
    }
}

#[test]
fn plancherel_matches_quadrature() {
    let grid = Grid::<f64>::new(1, 16.0, 1024).unwrap();
    let f = Field::from_fourier(&grid, Some(6.0), |xi| {
        Complex::new(phi_hat0(xi[0].abs() / 4.0), 0.3 * phi_hat0(xi[0].abs() / 3.0) * xi[0])
    })
    .unwrap();
    let q = weighted_lp(&f, fin(2.0), 0.0).unwrap();
    assert_relative_eq!(q, parseval_l2(&f), max_relative = 1e-8);
}

#[test]
fn dilation_law_for_weighted_norm() {
    let grid = Grid::<f64>::new(1, 32.0, 4096).unwrap();
    let base = |t: f64| {
        Field::from_fourier(&grid, Some(12.0 * t), move |xi| {
            Complex::new(phi_hat0(xi[0].abs() / (4.0 * t)) * (1.0 + 0.5 * xi[0] / t), 0.0)
        })
        .unwrap()
    };
    let f1 = base(1.0);
    for (p, gamma) in [(2.0, 0.5), (3.0, -0.5), (1.5, 1.0)] {
        let n1 = weighted_lp(&f1, fin(p), gamma).unwrap();
        for t in [0.5, 2.0] {
            let nt = weighted_lp(&base(t), fin(p), gamma).unwrap();
            // f̂_t(ξ) = f̂(ξ/t) means f_t(x) = t f(t x)
            let predicted = t.powf(1.0 - (1.0 + gamma) / p) * n1;
            assert_relative_eq!(nt, predicted, max_relative = 1e-3);
        }
    }
}

#[test]
fn radial_and_grid_agree() {
    // e^{−|x|²/2} in d = 2, sampled on the grid and tabulated radially
    let grid = Grid::<f64>::new(2, 8.0, 128).unwrap();
    let f = Field::from_real_fn(&grid, |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
    let radii = io::log_mesh(1e-6, 8.0, 4000);
    let values: Vec<f64> = radii.iter().map(|r| (-r * r / 2.0).exp()).collect();
    let prof = RadialProfile::tabulated(2, radii, values).unwrap();
    for gamma in [0.0, 0.5, -1.0] {
        let g = weighted_lp(&f, fin(3.0), gamma).unwrap();
        let r = radial_weighted_lp(&prof, 3.0, gamma).unwrap().finite().unwrap();
        assert_relative_eq!(g, r, max_relative = 1e-2);
    }
}

#[test]
fn upsampling_preserves_band_limited_values() {
    let grid = Grid::<f64>::new(1, 4.0, 64).unwrap();
    let f = Field::from_fourier(&grid, Some(5.0), |xi| Complex::new(phi_hat0(xi[0].abs() / 3.0), 0.0)).unwrap();
    let fine = f.upsample(4).unwrap();
    for i in 0..grid.n() {
        assert!((fine.values()[4 * i] - f.values()[i]).norm() < 1e-13);
    }
    let x = [0.123];
    let direct = f.eval_at(&x);
    let idx = ((x[0] + 4.0) / fine.grid().h()).floor() as usize;
    assert!(fine.values()[idx].norm() > 0.0);
    assert!(direct.norm() > 0.0);
    assert!(f.spectrum_consistency() < 1e-12);
}

#[test]
fn nyquist_rejected() {
    let grid = Grid::<f64>::new(1, 4.0, 64).unwrap();
    let r = Field::from_fourier(&grid, Some(grid.xi_max() * 1.01), |_| Complex::new(1.0, 0.0));
    assert!(matches!(r, Err(crate::Error::Nyquist { .. })));
}
