use gbbm_core::dispersion::{
    omega, omega_deriv, phase, phase_gradient, reflect, remainder_study, PhasePoint, SignPattern,
    TaylorModel, TaylorModelKind, SQRT3,
};
use gbbm_core::resonance::{manifold_point, ManifoldKind};
use proptest::prelude::*;

fn frequency() -> impl Strategy<Value = f64> {
    prop_oneof![-10.0..10.0, -1e6..1e6f64]
}

/// `|ξ| ∈ (1.001, 10⁶)`, log-uniform in magnitude.
fn outside_unit() -> impl Strategy<Value = f64> {
    (0.001f64.ln()..1e6f64.ln(), any::<bool>()).prop_map(|(l, neg)| {
        let x = 1.0 + l.exp();
        if neg {
            -x
        } else {
            x
        }
    })
}

fn point() -> impl Strategy<Value = PhasePoint> {
    prop::array::uniform5(-6.0..6.0f64)
        .prop_map(|v| PhasePoint::new([v[0], v[1], v[2], v[3]], v[4]))
}

proptest! {
    #[test]
    fn omega_is_odd_and_bounded(xi in frequency()) {
        prop_assert!((omega(-xi) + omega(xi)).abs() <= 1e-14);
        prop_assert!(omega(xi).abs() <= 0.5);
        let d = omega_deriv(xi, 1).unwrap();
        prop_assert!((omega_deriv(-xi, 1).unwrap() - d).abs() <= 1e-14);
    }

    #[test]
    fn group_velocity_is_reflection_invariant(xi in outside_unit()) {
        let r = reflect(xi).unwrap();
        prop_assert!(r.abs() > 1.0);
        prop_assert!(r.signum() == xi.signum());
        let lhs = omega_deriv(r, 1).unwrap();
        let rhs = omega_deriv(xi, 1).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn reflection_is_an_involution(xi in 1.001..50.0f64) {
        let back = reflect(reflect(xi).unwrap()).unwrap();
        prop_assert!((back - xi).abs() <= 1e-12 * xi.max(1.0) * 10.0);
    }

    #[test]
    fn eta5_is_always_derived(p in point()) {
        let s = p.slots();
        prop_assert_eq!(s[4], p.xi - (p.eta[0] + p.eta[1] + p.eta[2] + p.eta[3]));
        prop_assert_eq!(p.eta5(), s[4]);
    }

    #[test]
    fn gradient_matches_finite_differences(p in point()) {
        let h = 1e-6;
        let g = phase_gradient(&p);
        let at = |k: usize, dh: f64| {
            let mut q = p;
            if k < 4 { q.eta[k] += dh } else { q.xi += dh }
            phase(&q)
        };
        for (k, gk) in g.iter().enumerate() {
            let fd = (at(k, h) - at(k, -h)) / (2.0 * h);
            prop_assert!((gk - fd).abs() <= 1e-6, "slot {}: {} vs {}", k, gk, fd);
        }
    }

    #[test]
    fn phase_vanishes_on_line(eta in -100.0..100.0f64) {
        let p = manifold_point(ManifoldKind::Line, eta).unwrap();
        prop_assert!(phase(&p).abs() <= 1e-12);
    }

    #[test]
    fn phase_vanishes_on_curve(eta in outside_unit()) {
        let p = manifold_point(ManifoldKind::Curve, eta).unwrap();
        prop_assert!(phase(&p).abs() <= 1e-12);
        for g in &phase_gradient(&p)[..4] {
            prop_assert!(g.abs() <= 1e-12);
        }
    }
}

#[test]
fn anchor_values() {
    assert_eq!(omega(0.0), 0.0);
    assert_eq!(omega(1.0), 0.5);
    assert!((omega(SQRT3) - SQRT3 / 4.0).abs() <= 1e-16);
    assert_eq!(omega_deriv(0.0, 1).unwrap(), 1.0);
    assert!((omega_deriv(SQRT3, 1).unwrap() + 0.125).abs() <= 1e-16);
    assert!(omega_deriv(SQRT3, 2).unwrap().abs() <= 1e-16);
    assert!((omega_deriv(SQRT3, 3).unwrap() - 3.0 / 16.0).abs() <= 1e-15);
    assert!((omega_deriv(-SQRT3, 3).unwrap() - 3.0 / 16.0).abs() <= 1e-15);
    assert!(omega_deriv(1.0, 0).is_err());
    assert!(omega_deriv(1.0, 4).is_err());
    assert!((reflect(SQRT3).unwrap() - SQRT3).abs() <= 1e-15);
    assert!((reflect(1e8).unwrap() - 1.0).abs() <= 1e-15);
    assert!(reflect(1.0).is_err());
    assert!(reflect(-1.0 - 1e-10).is_err());
}

#[test]
fn frozen_generic_phase_value() {
    // (1, 1, 1, 1; 1/2): η₅ = −7/2, φ = 2 − 14/53 − 2/5 = 354/265
    let p = PhasePoint::new([1.0; 4], 0.5);
    assert!((phase(&p) - 354.0 / 265.0).abs() <= 1e-15);
}

#[test]
fn sqrt3_models_degenerate_to_cubic_for_every_sign_pattern() {
    let mut count = 0;
    for bits in 0u8..32 {
        let s = |j: u8| if bits >> j & 1 == 1 { -1 } else { 1 };
        let Ok(signs) = SignPattern::new([s(0), s(1), s(2), s(3)], s(4)) else {
            continue;
        };
        count += 1;
        let m = TaylorModel::new(TaylorModelKind::NonDegenerateSqrt3 { signs }, 0.5).unwrap();
        assert!(m.constant().abs() <= 1e-12);
        assert!(m.linear().iter().all(|c| c.abs() <= 1e-12));
        assert!(m.quadratic().iter().flatten().all(|c| c.abs() <= 1e-12));
        let c = m.cubic_slots();
        assert!(c.iter().all(|v| (v.abs() - 1.0 / 32.0).abs() <= 1e-15));
    }
    // σ_ξ − Σσ_j ∈ {±1} admits 20 of the 32 patterns
    assert_eq!(count, 20);
}

#[test]
fn remainder_orders() {
    let eta0 = gbbm_core::solve_anomalous(1e-13).unwrap().eta0;
    let dir = [0.3, -0.7, 0.5, 0.9, -0.4];
    let cases: [(TaylorModelKind, f64); 4] = [
        (TaylorModelKind::Anomalous { eta0 }, 0.05),
        ("origin".parse().unwrap(), 0.05),
        ("sqrt3".parse().unwrap(), 0.05),
        ("line".parse().unwrap(), 0.5),
    ];
    for (kind, dev) in cases {
        let m = TaylorModel::new(kind, 1.0).unwrap();
        let study = remainder_study(&m, dir, dev, 4).unwrap();
        let floor = 0.8 * 2f64.powi(m.order() as i32 + 1);
        for r in &study.ratios {
            assert!(*r >= floor, "{}: ratios {:?}", study.kind, study.ratios);
        }
    }
}
