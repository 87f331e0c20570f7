use std::sync::Arc;

use gbbm_core::diagnostics::{fit_decay, free_decay_series};
use gbbm_core::solver::RunConfig;
use gbbm_core::spectral::*;
use proptest::prelude::*;

fn field(grid: &Arc<Grid>, values: &[f64]) -> SpectralField {
    SpectralField::from_real(grid, values).unwrap()
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(v in values(256), length in 1.0..1e3f64) {
        let g = make_grid(256, length).unwrap();
        let f = field(&g, &v);
        prop_assert!(f.is_hermitian(1e-14));
        let back = f.to_complex();
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
        for (a, b) in v.iter().zip(&back) {
            prop_assert!((a - b.re).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn plancherel(v in values(128)) {
        let g = make_grid(128, 20.0).unwrap();
        let f = field(&g, &v);
        let direct = (g.dx() * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
        prop_assert!((direct - f.l2()).abs() <= 1e-13 * direct.max(1e-300));
    }

    #[test]
    fn free_flow_group_law(v in values(128), s in -50.0..50.0f64, t in -50.0..50.0f64) {
        let g = make_grid(128, 40.0).unwrap();
        let f = field(&g, &v);
        let a = free_evolve(&free_evolve(&f, s), t);
        let b = free_evolve(&f, s + t);
        prop_assert!(a.max_rel_diff(&b).unwrap() <= 1e-12);
        let e = free_evolve(&f, t);
        prop_assert!((e.hs(8.0) - f.hs(8.0)).abs() <= 1e-13 * f.hs(8.0));
    }

    #[test]
    fn lp_decomposition_reconstructs(v in values(256), k0 in -6i32..3) {
        let g = make_grid(256, 50.0).unwrap();
        let f = field(&g, &v);
        let mut acc = SpectralField::zeros(&g);
        for (_, part) in lp_decompose(&f, k0).unwrap() {
            acc = acc.add(&part).unwrap();
        }
        prop_assert!(acc.max_rel_diff(&f).unwrap() <= 1e-12);
    }

    #[test]
    fn partition_of_unity(xi in -1e3..1e3f64, k0 in -8i32..4) {
        let top = (xi.abs().max(1.0).log2().ceil() as i32 + 1).max(k0 + 1);
        let mut sum = low_pass_multiplier(k0, xi);
        for k in k0 + 1..=top {
            sum += band_multiplier(k, xi);
        }
        prop_assert!((sum - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn band_support(xi in -1e3..1e3f64, k in -6i32..8) {
        let a = xi.abs();
        let m = band_multiplier(k, xi);
        prop_assert!((0.0..=1.0).contains(&m));
        if a <= 2f64.powi(k - 1) || a >= 2f64.powi(k + 1) {
            prop_assert_eq!(m, 0.0);
        }
        prop_assert_eq!(low_pass_multiplier(k, xi) == 1.0, a <= 2f64.powi(k) || low_pass_multiplier(k, xi) == 1.0);
    }
}

#[test]
fn linear_gaussian_decays_like_cube_root() {
    let g = make_grid(4096, 800.0).unwrap();
    let f0 = RunConfig::default().initial_profile(&g);
    let times: Vec<f64> = (0..40).map(|i| 20.0 + 380.0 * i as f64 / 39.0).collect();
    let sup = free_decay_series(&f0, &times);
    let fit = fit_decay(&times, &sup, (20.0, 400.0)).unwrap();
    assert!(fit.within(-1.0 / 3.0, 0.05), "{}", fit.fitted_exponent);
}

#[test]
fn decay_regime_ratios_are_bounded() {
    let g = make_grid(4096, 800.0).unwrap();
    let f0 = RunConfig::default().initial_profile(&g);
    let times = [1.0, 4.0, 16.0, 64.0, 256.0];
    let bands: Vec<i32> = (-6..=4).collect();
    let rep = decay_regime_report(&f0, &times, &bands, DecayRegime::default(), 1.0).unwrap();
    assert!(rep.pass, "max ratio {}", rep.max_ratio);
    assert_eq!(rep.rows.len(), times.len() * bands.len());
    let rows = |r: Regime| rep.rows.iter().filter(|x| x.regime == r).count();
    for r in [
        Regime::High,
        Regime::UpperMiddle,
        Regime::Middle,
        Regime::LowerMiddle,
        Regime::Low,
    ] {
        assert!(rows(r) > 0, "{r:?} not sampled");
    }
    let mut buf = Vec::new();
    write_regime_csv(&mut buf, &rep).unwrap();
    assert!(String::from_utf8(buf)
        .unwrap()
        .starts_with("k,t,regime,measured,rhs,ratio\n"));
    assert!(decay_regime_report(&f0, &[0.5], &bands, DecayRegime::default(), 1.0).is_err());
}
