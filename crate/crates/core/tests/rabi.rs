mod common;

use common::max_abs_diff_sorted;
use cqed_core::linalg::{hermitian_eigvals, transitions};
use cqed_core::rabi::*;
use cqed_core::OperatorMatrix;
use proptest::prelude::*;

fn levels(h: &OperatorMatrix, k: usize) -> Vec<f64> {
    let v = hermitian_eigvals(h).unwrap();
    let e0 = v[0];
    v[..k].iter().map(|e| e - e0).collect()
}

fn trans(h: &OperatorMatrix, k: usize) -> Vec<f64> {
    transitions(&hermitian_eigvals(h).unwrap(), k)
}

fn resonant(eta: f64, cutoff: usize) -> RabiParams {
    RabiParams::with_detuning(0.0, eta, cutoff).unwrap()
}

// Dense numpy diagonalization at cutoff 300; cutoff 150 agrees to 2e-14.
const H_D_ETA1_GOLDEN: [f64; 6] = [
    0.1377674281369,
    0.9162232290891,
    1.28138118357383,
    2.07498959523512,
    2.25275519294303,
    2.99072671504032,
];

// Same oracle, δ = 0.5 ω_c, η = 0.5.
const H_D_ETA05_DETUNED_GOLDEN: [f64; 6] = [
    0.65323975178998,
    1.45714001646567,
    1.81614505785505,
    2.33579127873985,
    2.90393462403941,
    3.31544359623867,
];

#[test]
fn dipole_golden_values_strong_coupling() {
    let t = trans(&build_h_d(&resonant(1.0, 120)).unwrap(), 6);
    assert!(max_abs_diff_sorted(&t, &H_D_ETA1_GOLDEN) < 1e-10, "{t:?}");
    let p = RabiParams::with_detuning(0.5, 0.5, 120).unwrap();
    let t = trans(&build_h_d(&p).unwrap(), 6);
    assert!(max_abs_diff_sorted(&t, &H_D_ETA05_DETUNED_GOLDEN) < 1e-10, "{t:?}");
}

#[test]
fn jaynes_cummings_doublet() {
    let p = resonant(0.01, 30);
    let t = trans(&build_h_d(&p).unwrap(), 2);
    let split = t[1] - t[0];
    assert!((split / (2.0 * p.g_d()) - 1.0).abs() < 0.01, "split {split}");
}

#[test]
fn standard_coulomb_weak_coupling_agrees() {
    let p = resonant(0.05, 40);
    let d = trans(&build_h_d(&p).unwrap(), 4);
    let s = trans(&build_h_c_standard(&p, None).unwrap(), 4);
    for (a, b) in s.iter().zip(&d) {
        assert!((a / b - 1.0).abs() < 0.01, "{s:?} vs {d:?}");
    }
}

#[test]
fn standard_coulomb_fails_at_strong_coupling() {
    let p = resonant(1.0, 120);
    let s = trans(&build_h_c_standard(&p, None).unwrap(), 1)[0];
    // numpy oracle: 0.81378097629059
    assert!((s - 0.81378097629059).abs() < 1e-9, "{s}");
    assert!((s - H_D_ETA1_GOLDEN[0]).abs() / H_D_ETA1_GOLDEN[0] > 0.10);
}

#[test]
fn diamagnetic_override_is_used() {
    let p = resonant(0.4, 30);
    let a = build_h_c_standard(&p, Some(0.0)).unwrap();
    let b = build_h_c_standard(&p, None).unwrap();
    assert!(a.max_abs_diff(&b) > 0.1);
}

#[test]
fn correct_coulomb_methods_agree() {
    for (delta, eta) in [(0.0, 0.3), (0.5, 0.8), (0.0, 1.5)] {
        let p = RabiParams::with_detuning(delta, eta, 60).unwrap();
        let a = build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap();
        let b = build_h_c_correct(&p, CorrectMethod::Conjugation).unwrap();
        let ta = trans(&a, 10);
        let tb = trans(&b, 10);
        assert!(max_abs_diff_sorted(&ta, &tb) < 1e-9, "η={eta}");
    }
}

#[test]
fn correct_coulomb_cutoff_convergence() {
    let p = RabiParams::with_detuning(0.5, 0.3, 80).unwrap();
    let a = trans(&build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap(), 6);
    let b = trans(
        &build_h_c_correct(&p.with_cutoff(160), CorrectMethod::ClosedForm).unwrap(),
        6,
    );
    assert!(max_abs_diff_sorted(&a, &b) < 1e-8);
}

#[test]
fn headline_spectral_equality_grid() {
    for delta in [0.0, 0.5] {
        for eta in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5] {
            let p = RabiParams::with_detuning(delta, eta, 60).unwrap();
            let d = levels(&build_h_d(&p).unwrap(), 10);
            let c = levels(&build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap(), 10);
            let dev = max_abs_diff_sorted(&d, &c);
            assert!(dev < 1e-6, "δ={delta} η={eta}: {dev:e}");
        }
    }
}

#[test]
fn taylor_high_order_reaches_exact() {
    let p = resonant(0.5, 60);
    let exact = trans(&build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap(), 8);
    let t = trans(&build_h_c_taylor(&p, 400).unwrap(), 8);
    assert!(max_abs_diff_sorted(&exact, &t) < 1e-8);
}

#[test]
fn taylor_second_order_weak_coupling() {
    let p = resonant(0.05, 60);
    let exact = trans(&build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap(), 5);
    let t = trans(&build_h_c_taylor(&p, 2).unwrap(), 5);
    for (a, b) in t.iter().zip(&exact) {
        assert!((a - b).abs() / b.max(1.0) < 0.01);
    }
}

fn taylor_error(eta: f64, order: usize, cutoff: usize) -> f64 {
    let p = resonant(eta, cutoff);
    let exact = trans(&build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap(), 5);
    let t = trans(&build_h_c_taylor(&p, order).unwrap(), 5);
    t.iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs() / b.max(p.omega_c))
        .fold(0.0, f64::max)
}

#[test]
fn taylor_order_200_validity_window() {
    assert!(taylor_error(1.3, 200, 200) < 0.01);
    assert!(taylor_error(1.6, 200, 200) > 0.01);
}

#[test]
fn taylor_converges_in_operator_norm() {
    // Low orders overshoot before the factorial wins; check the tail of the sequence.
    let p = resonant(0.5, 30);
    let exact = build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap();
    let errs: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| build_h_c_taylor(&p, n).unwrap().max_abs_diff(&exact))
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
    assert!(errs[3] < 1e-12, "{errs:?}");
}

#[test]
fn alpha_family_spectra_coincide() {
    let base = resonant(0.8, 60);
    let reference = levels(&build_h_d(&base).unwrap(), 10);
    for alpha in [0.25, 0.5, 0.75] {
        let h = build_h_alpha(&base, GaugeParam::new(alpha).unwrap()).unwrap();
        let dev = max_abs_diff_sorted(&levels(&h, 10), &reference);
        assert!(dev < 1e-6, "α={alpha}: {dev:e}");
    }
}

#[test]
fn gauge_theorem_interior_block() {
    let r = check_gauge_theorem(&resonant(0.5, 100)).unwrap();
    assert_eq!(r.interior_levels, 80);
    assert!(r.interior_deviation <= 1e-8, "{r:?}");
    assert!(r.passes(1.0));
    // The truncation artifact lives at the top of the Fock ladder.
    assert!(r.boundary_deviation > 1e3 * r.interior_deviation);
    assert_eq!(r.full_deviation, r.boundary_deviation.max(r.interior_deviation));
}

#[test]
fn gauge_theorem_needs_the_dropped_constant() {
    let p = resonant(0.5, 100);
    assert_eq!(dropped_constant(&p), 0.25);
    let u = gauge_unitary(&p).unwrap();
    let bare = cqed_core::linalg::conjugate(&u, &build_h_d(&p).unwrap()).unwrap();
    let h_c = build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap();
    // Without the constant every interior diagonal entry is off by exactly g_D²/ω_c.
    for k in [0, 10, 50, 101, 150] {
        let d = (h_c.get(k, k) - bare.get(k, k)).re;
        assert!((d - 0.25).abs() < 1e-9, "level {k}: {d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dipole_and_correct_coulomb_are_isospectral(eta in 0.0f64..1.5, detuned in any::<bool>()) {
        let delta = if detuned { 0.5 } else { 0.0 };
        let p = RabiParams::with_detuning(delta, eta, 60).unwrap();
        let d = levels(&build_h_d(&p).unwrap(), 10);
        let c = levels(&build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap(), 10);
        prop_assert!(max_abs_diff_sorted(&d, &c) < 1e-6);
    }

    #[test]
    fn alpha_independence(eta in 0.0f64..1.2, alpha in 0.0f64..=1.0) {
        let p = resonant(eta, 60);
        let d = levels(&build_h_d(&p).unwrap(), 10);
        let a = levels(&build_h_alpha(&p, GaugeParam::new(alpha).unwrap()).unwrap(), 10);
        prop_assert!(max_abs_diff_sorted(&d, &a) < 1e-6);
    }

    #[test]
    fn every_builder_is_hermitian(eta in 0.0f64..1.5, w10 in 0.2f64..3.0, cutoff in 1usize..30, alpha in 0.0f64..=1.0, order in 1usize..12) {
        let p = RabiParams::new(1.0, w10, eta, cutoff).unwrap();
        let hs = [
            build_h_d(&p).unwrap(),
            build_h_c_standard(&p, None).unwrap(),
            build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap(),
            build_h_c_correct(&p, CorrectMethod::Conjugation).unwrap(),
            build_h_c_taylor(&p, order).unwrap(),
            build_h_alpha(&p, GaugeParam::new(alpha).unwrap()).unwrap(),
        ];
        for h in &hs {
            prop_assert!(h.hermiticity_defect() <= 1e-12 * h.max_abs());
        }
    }

    #[test]
    fn endpoints_entrywise(eta in 0.0f64..1.5, w10 in 0.2f64..3.0, cutoff in 1usize..30) {
        let p = RabiParams::new(1.0, w10, eta, cutoff).unwrap();
        prop_assert_eq!(build_h_alpha(&p, GaugeParam::DIPOLE).unwrap(), build_h_d(&p).unwrap());
        prop_assert_eq!(
            build_h_alpha(&p, GaugeParam::COULOMB).unwrap(),
            build_h_c_correct(&p, CorrectMethod::ClosedForm).unwrap()
        );
    }
}
