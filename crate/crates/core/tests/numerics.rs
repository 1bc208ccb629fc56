use approx::assert_relative_eq;
use proptest::prelude::*;

use powemb::lpengine::{make_dyadic, phi_hat, phi_hat0, weighted_lp, DyadicSystem, Grid};
use powemb::norms::Analyzer;
use powemb::verify::centered_gaussian;
use powemb::witnesses::{dilate, random_band_limited, translate};
use powemb::Extended;

fn fin(v: f64) -> Extended<f64> {
    Extended::Finite(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn blocks_sum_to_one(r in 0.0f64..5000.0) {
        let total: f64 = phi_hat0(r) + (1..=16).map(|k| phi_hat(k, r)).sum::<f64>();
        prop_assert!((total - 1.0).abs() < 1e-12, "sum {} at {}", total, r);
    }

    #[test]
    fn block_support_is_dyadic(k in 1u32..12, x in 0.0f64..1.0) {
        let r = x * DyadicSystem::<f64>::band(k) * 1.5;
        if phi_hat(k, r) > 0.0 {
            prop_assert!(r > DyadicSystem::<f64>::inner(k) && r < DyadicSystem::<f64>::band(k));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unweighted_norm_is_translation_invariant(band in 1.0f64..6.0, shift in 1i32..16) {
        let grid = Grid::<f64>::new(1, 64.0, 1 << 11).unwrap();
        let f = centered_gaussian(&grid, band).unwrap();
        let g = translate(&f, f64::from(shift) * 0.5).unwrap();
        let (a, b) = (weighted_lp(&f, fin(3.0), 0.0).unwrap(), weighted_lp(&g, fin(3.0), 0.0).unwrap());
        prop_assert!((a / b - 1.0).abs() < 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn weighted_norm_follows_the_dilation_law(seed in 0u64..1000, gamma in -0.5f64..2.0) {
        // ‖t f(t·)‖_{L^p(|x|^γ)} = t^{1 − (1+γ)/p} ‖f‖ in one dimension
        let grid = Grid::<f64>::new(1, 64.0, 1 << 12).unwrap();
        let f = random_band_limited(&grid, 1.0, seed).unwrap();
        let t = 2.0;
        let g = dilate(&f, t).unwrap();
        let p = 2.0;
        let ratio = weighted_lp(&g, fin(p), gamma).unwrap() / weighted_lp(&f, fin(p), gamma).unwrap();
        let want = t.powf(1.0 - (1.0 + gamma) / p);
        prop_assert!((ratio / want - 1.0).abs() < 1e-3, "{} vs {}", ratio, want);
    }

    #[test]
    fn norms_are_homogeneous(seed in 0u64..1000, c in 0.1f64..10.0) {
        let grid = Grid::<f64>::new(1, 16.0, 1 << 10).unwrap();
        let an = Analyzer::new(&grid);
        let f = random_band_limited(&grid, 4.0, seed).unwrap();
        let g = f.scale(c);
        let b = |h| an.besov_norm(h, 0.5, fin(2.0), fin(1.0), 0.5).unwrap().value;
        let t = |h| an.triebel_norm(h, 0.5, fin(3.0), fin(2.0), 0.0).unwrap().value;
        prop_assert!((b(&g) / b(&f) - c).abs() < 1e-9 * c);
        prop_assert!((t(&g) / t(&f) - c).abs() < 1e-9 * c);
    }
}

#[test]
fn besov_norm_grows_with_smoothness() {
    let grid = Grid::<f64>::new(1, 16.0, 1 << 11).unwrap();
    let an = Analyzer::from_system(make_dyadic(&grid));
    let f = random_band_limited(&grid, 20.0, 3).unwrap();
    let norms: Vec<f64> = [0.0, 0.5, 1.0, 1.5]
        .iter()
        .map(|&s| an.besov_norm(&f, s, fin(2.0), fin(2.0), 0.0).unwrap().value)
        .collect();
    assert!(norms.windows(2).all(|w| w[1] > w[0]), "{norms:?}");
}

#[test]
fn b22_equals_f22() {
    let grid = Grid::<f64>::new(1, 16.0, 1 << 11).unwrap();
    let an = Analyzer::new(&grid);
    let f = random_band_limited(&grid, 10.0, 5).unwrap();
    let b = an.besov_norm(&f, 1.0, fin(2.0), fin(2.0), 0.5).unwrap().value;
    let t = an.triebel_norm(&f, 1.0, fin(2.0), fin(2.0), 0.5).unwrap().value;
    assert_relative_eq!(b, t, max_relative = 1e-10);
}
