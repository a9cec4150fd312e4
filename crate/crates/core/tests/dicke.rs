mod common;

use common::max_abs_diff_sorted;
use cqed_core::dicke::*;
use cqed_core::linalg::{conjugate, hermitian_eigvals, kron, transitions, unitary_exp};
use cqed_core::qops::{fock_ops, spin_ops, FockSpace, SpinSpace};
use cqed_core::rabi::{build_h_c_standard, RabiParams};
use cqed_core::OperatorMatrix;
use proptest::prelude::*;

fn params(n: usize, delta: f64, eta: f64, cutoff: usize) -> DickeParams {
    DickeParams::new(RabiParams::with_detuning(delta, eta, cutoff).unwrap(), n).unwrap()
}

fn trans(h: &OperatorMatrix, k: usize) -> Vec<f64> {
    transitions(&hermitian_eigvals(h).unwrap(), k)
}

// Dense numpy oracle, N = 4, η = 0.3, δ = 0, cutoffs 80 and 160 agree to 1e-13.
const STANDARD_N4_GOLDEN: [f64; 6] = [
    0.65004020622454,
    1.46835313678843,
    1.76925039794663,
    2.38392026552331,
    2.4372334008857,
    3.16163063604854,
];
const CORRECT_N4_GOLDEN: [f64; 6] = [
    0.53750764602338,
    1.10458180793828,
    1.69580315140475,
    1.72480056102417,
    2.19254915538429,
    2.36092626145676,
];

#[test]
fn standard_golden_values() {
    let t = trans(&build_dicke_standard(&params(4, 0.0, 0.3, 60), None).unwrap(), 6);
    assert!(max_abs_diff_sorted(&t, &STANDARD_N4_GOLDEN) < 1e-10, "{t:?}");
}

#[test]
fn correct_golden_values_all_routes() {
    let p = params(4, 0.0, 0.3, 60);
    for h in [
        build_dicke_correct(&p, DickeMethod::Conjugation).unwrap(),
        build_dicke_correct(&p, DickeMethod::ClosedForm { factor: 2.0 }).unwrap(),
        build_dicke_dipole(&p).unwrap(),
    ] {
        let t = trans(&h, 6);
        assert!(max_abs_diff_sorted(&t, &CORRECT_N4_GOLDEN) < 1e-9, "{t:?}");
    }
}

#[test]
fn single_dipole_standard_spectrum() {
    let p = params(1, 0.5, 0.7, 40);
    let a = hermitian_eigvals(&build_dicke_standard(&p, None).unwrap()).unwrap();
    let b = hermitian_eigvals(&build_h_c_standard(&p.base, None).unwrap()).unwrap();
    assert!(max_abs_diff_sorted(&a, &b) < 1e-10);
}

#[test]
fn uncoupled_spectrum() {
    let p = params(3, 0.4, 0.0, 6);
    let mut expected = Vec::new();
    for k in 0..4 {
        for n in 0..7 {
            expected.push(1.4 * (k as f64 - 1.5) + n as f64);
        }
    }
    expected.sort_by(f64::total_cmp);
    for h in [
        build_dicke_standard(&p, None).unwrap(),
        build_dicke_correct(&p, DickeMethod::Conjugation).unwrap(),
        build_dicke_dipole(&p).unwrap(),
    ] {
        let v = hermitian_eigvals(&h).unwrap();
        assert!(max_abs_diff_sorted(&v, &expected) < 1e-12);
    }
}

#[test]
fn closed_form_factor_is_two() {
    for (n, eta) in [(1, 0.5), (2, 0.3), (4, 0.3), (6, 0.8)] {
        let r = closed_form_factor_report(&params(n, 0.0, eta, 50), &[2.0, 4.0]).unwrap();
        assert_eq!(r.best_factor, 2.0, "{r:?}");
        assert!(r.deviations[0].1 < 1e-9, "{r:?}");
        assert!(r.deviations[1].1 > 1e-2, "{r:?}");
    }
}

#[test]
fn dipole_and_correct_coulomb_spectra_coincide() {
    for eta in [0.2, 0.6, 1.0] {
        let p = params(4, 0.5, eta, 60);
        let d = trans(&build_dicke_dipole(&p).unwrap(), 10);
        let c = trans(&build_dicke_correct(&p, DickeMethod::Conjugation).unwrap(), 10);
        assert!(max_abs_diff_sorted(&d, &c) < 1e-6, "η={eta}");
    }
}

#[test]
fn hamiltonians_commute_with_total_spin() {
    let p = params(5, 0.2, 0.6, 20);
    let s = spin_ops(SpinSpace::new(5).unwrap());
    let j2 = kron(&s.casimir(), &OperatorMatrix::identity(21)).unwrap();
    for h in [
        build_dicke_standard(&p, None).unwrap(),
        build_dicke_correct(&p, DickeMethod::Conjugation).unwrap(),
        build_dicke_dipole(&p).unwrap(),
    ] {
        assert!(h.commutator(&j2).max_abs() < 1e-10 * h.max_abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spectrum_invariant_under_further_rotation(n in 1usize..5, eta in 0.0f64..1.0, beta in -1.0f64..1.0) {
        let cutoff = 20;
        let p = params(n, 0.3, eta, cutoff);
        let h = build_dicke_correct(&p, DickeMethod::Conjugation).unwrap();
        let s = spin_ops(SpinSpace::new(n).unwrap());
        let x = fock_ops(FockSpace::new(cutoff).unwrap()).position();
        let v = unitary_exp(&kron(&s.jx, &x).unwrap(), beta).unwrap();
        let rotated = conjugate(&v, &h).unwrap();
        let back = conjugate(&v.adjoint(), &rotated).unwrap();
        let a = hermitian_eigvals(&h).unwrap();
        let b = hermitian_eigvals(&rotated).unwrap();
        prop_assert!(max_abs_diff_sorted(&a, &b) < 1e-9 * h.max_abs().max(1.0));
        prop_assert!(back.max_abs_diff(&h) < 1e-9 * h.max_abs().max(1.0));
    }

    #[test]
    fn builders_are_hermitian(n in 1usize..6, eta in 0.0f64..1.5, cutoff in 1usize..15) {
        let p = params(n, 0.2, eta, cutoff);
        for h in [
            build_dicke_standard(&p, None).unwrap(),
            build_dicke_correct(&p, DickeMethod::Conjugation).unwrap(),
            build_dicke_correct(&p, DickeMethod::ClosedForm { factor: 2.0 }).unwrap(),
            build_dicke_dipole(&p).unwrap(),
        ] {
            prop_assert!(h.hermiticity_defect() <= 1e-12 * h.max_abs());
        }
    }
}
