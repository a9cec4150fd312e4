mod common;

use common::max_abs_diff_sorted;
use cqed_core::fluxonium::*;
use cqed_core::linalg::{conjugate, hermitian_eigvals, kron, transitions};
use cqed_core::qops::{fock_ops, pauli, FockSpace};
use cqed_core::rabi::{build_h_c_correct, build_h_c_standard, CorrectMethod, RabiParams};
use cqed_core::{Error, OperatorMatrix, C64};
use proptest::prelude::*;

// HO-basis numpy diagonalization at sizes 80..640 agreeing to 1e-13.
const GOLDEN_OMEGA10: f64 = 1.25643179280880;
const GOLDEN_OMEGA21: f64 = 0.83014935051398;
const GOLDEN_PHI10: f64 = 0.88642911401439;

fn anharmonic(chi0: f64, cutoff: usize) -> FluxoniumParams {
    FluxoniumParams::new(0.25, 0.15, 1.0, 80, 1.0, chi0, cutoff).unwrap()
}

/// Sturm count: eigenvalues of the symmetric tridiagonal `(d, e)` below `x`.
fn count_below(d: &[f64], e: f64, x: f64) -> usize {
    let mut q = 1.0f64;
    let mut count = 0;
    for (k, &dk) in d.iter().enumerate() {
        q = dk - x - if k == 0 { 0.0 } else { e * e / q };
        if q == 0.0 {
            q = 1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `k` levels of `−4Ẽ_C ∂²_φ + Ẽ_L φ²/2 − E_J cos φ` by second-order
/// differences on `[−L, L]` and bisection.
fn phase_grid_levels(e_c: f64, e_l: f64, e_j: f64, n: usize, k: usize) -> Vec<f64> {
    let half = 14.0;
    let h = 2.0 * half / (n - 1) as f64;
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let x = -half + i as f64 * h;
            8.0 * e_c / (h * h) + 0.5 * e_l * x * x - e_j * x.cos()
        })
        .collect();
    let off = -4.0 * e_c / (h * h);
    (0..k)
        .map(|level| {
            let (mut lo, mut hi) = (-e_j - 1.0, 100.0);
            while hi - lo > 1e-13 {
                let mid = 0.5 * (lo + hi);
                if count_below(&d, off, mid) > level {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

#[test]
fn quadratic_limit_is_harmonic() {
    let p = FluxoniumParams::new(0.3, 0.2, 0.0, 60, 1.0, 0.0, 4).unwrap();
    let b = solve_fluxonium(&p).unwrap();
    let w = (8.0f64 * 0.3 * 0.2).sqrt();
    for pair in b.energies.windows(2) {
        assert!((pair[1] - pair[0] - w).abs() < 1e-8);
    }
    assert!((b.phi_10() - (2.0f64 * 0.3 / 0.2).powf(0.25)).abs() < 1e-6);
}

#[test]
fn anharmonic_golden_values() {
    let b = solve_fluxonium(&anharmonic(0.0, 4)).unwrap();
    assert!((b.omega_10() - GOLDEN_OMEGA10).abs() < 1e-10);
    assert!((b.energies[2] - b.energies[1] - GOLDEN_OMEGA21).abs() < 1e-10);
    assert!((b.phi_10() - GOLDEN_PHI10).abs() < 1e-10);
}

#[test]
fn phase_grid_oracle_agrees() {
    let coarse = phase_grid_levels(0.25, 0.15, 1.0, 4001, 4);
    let fine = phase_grid_levels(0.25, 0.15, 1.0, 8001, 4);
    let extrapolated: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    let b = solve_fluxonium(&anharmonic(0.0, 4)).unwrap();
    for (e, g) in b.energies.iter().zip(&extrapolated) {
        assert!((e - g).abs() < 1e-8, "{e} vs {g}");
    }
}

#[test]
fn matrix_elements_are_consistent() {
    let b = solve_fluxonium(&anharmonic(0.0, 4)).unwrap();
    assert!(b.phi_10() > 0.0);
    // N = −i[φ, H]/(8Ẽ_C) between eigenstates.
    for i in 0..6 {
        for j in 0..6 {
            let phi = b.phi_elems.get(i, j);
            assert!(phi.im.abs() < 1e-12);
            let expected = C64::new(0.0, (b.energies[i] - b.energies[j]) * phi.re / (8.0 * 0.25));
            assert!((b.n_elems.get(i, j) - expected).norm() < 1e-9, "({i},{j})");
        }
    }
    // Zero flux: parity forbids φ between levels of equal parity.
    assert!(b.phi_elems.get(2, 0).norm() < 1e-12);
}

#[test]
fn small_basis_is_rejected() {
    let p = FluxoniumParams::new(0.25, 0.15, 1.0, 40, 1.0, 0.0, 4).unwrap();
    match solve_fluxonium(&p) {
        Err(Error::BasisTooSmall { size: 40, shift, .. }) => assert!(shift > 1e-8),
        other => panic!("{other:?}"),
    }
}

#[test]
fn decoupled_without_charge_coupling() {
    let p = anharmonic(0.0, 6);
    let b = solve_fluxonium(&p).unwrap();
    let mut expected = Vec::new();
    for s in [-0.5, 0.5] {
        for n in 0..7 {
            expected.push(s * b.omega_10() + n as f64);
        }
    }
    expected.sort_by(f64::total_cmp);
    for h in [
        build_flux_charge_standard(&p, &b).unwrap(),
        build_flux_charge_correct(&p, &b, FluxMethod::Conjugation).unwrap(),
        build_flux_charge_correct(&p, &b, FluxMethod::ClosedForm).unwrap(),
    ] {
        assert!(max_abs_diff_sorted(&hermitian_eigvals(&h).unwrap(), &expected) < 1e-12);
    }
}

#[test]
fn resonant_vacuum_rabi_splitting() {
    let base = anharmonic(0.0, 10);
    let b = solve_fluxonium(&base).unwrap();
    let mut p = base;
    p.omega_c = b.omega_10();
    p.chi0 = 1e-3 / b.phi_10();
    let g = b.g_c(p.chi0);
    let e = hermitian_eigvals(&build_flux_charge_standard(&p, &b).unwrap()).unwrap();
    let splitting = e[2] - e[1];
    assert!((splitting / (2.0 * g) - 1.0).abs() < 1e-2, "{splitting} vs {}", 2.0 * g);
}

#[test]
fn standard_fails_at_strong_coupling() {
    let base = anharmonic(0.0, 60);
    let b = solve_fluxonium(&base).unwrap();
    let p = base.with_chi0(1.0 / b.phi_10());
    assert!((b.g_c(p.chi0) / b.omega_10() - 1.0).abs() < 1e-12);
    let s = transitions(
        &hermitian_eigvals(&build_flux_charge_standard(&p, &b).unwrap()).unwrap(),
        1,
    )[0];
    let c = transitions(
        &hermitian_eigvals(&build_flux_charge_correct(&p, &b, FluxMethod::Conjugation).unwrap()).unwrap(),
        1,
    )[0];
    assert!((s - c).abs() / c > 0.1, "standard {s}, correct {c}");
}

#[test]
fn closed_form_matches_conjugation() {
    let base = anharmonic(0.0, 40);
    let b = solve_fluxonium(&base).unwrap();
    for chi0 in [0.1, 0.5, 1.2] {
        let p = base.with_chi0(chi0);
        let conj = build_flux_charge_correct(&p, &b, FluxMethod::Conjugation).unwrap();
        let closed = build_flux_charge_correct(&p, &b, FluxMethod::ClosedForm).unwrap();
        assert!(conj.max_abs_diff(&closed) < 1e-9, "χ₀={chi0}");
    }
}

#[test]
fn closed_form_with_opposite_sinh_sign_disagrees() {
    // The other σ_y placement differs at first order in κ.
    let base = anharmonic(0.0, 20);
    let b = solve_fluxonium(&base).unwrap();
    let p = base.with_chi0(0.005);
    let conj = build_flux_charge_correct(&p, &b, FluxMethod::Conjugation).unwrap();
    let ops = fock_ops(FockSpace::new(20).unwrap());
    let kappa = b.g_c(p.chi0) / b.omega_10();
    let sz = kron(&pauli().z.scale_real(b.omega_10() / 2.0), &OperatorMatrix::identity(21)).unwrap();
    let linear = kron(&pauli().y, &ops.momentum()).unwrap();
    let mut first_order = sz.clone();
    first_order.add_scaled(C64::new(b.omega_10() * kappa, 0.0), &linear);
    let mut flipped = sz;
    flipped.add_scaled(C64::new(-b.omega_10() * kappa, 0.0), &linear);
    let mut rotated = conj.clone();
    let n = kron(&OperatorMatrix::identity(2), &ops.n_op).unwrap();
    rotated.add_scaled(C64::new(-1.0, 0.0), &n);
    let interior: Vec<usize> = (0..6).chain(21..27).collect();
    let good = rotated
        .principal_block(&interior)
        .max_abs_diff(&first_order.principal_block(&interior));
    let bad = rotated
        .principal_block(&interior)
        .max_abs_diff(&flipped.principal_block(&interior));
    assert!(good < 0.05 * bad, "{good} vs {bad}");
}

#[test]
fn gauge_unitary_is_unitary_and_preserves_qubit_spectrum() {
    let p = anharmonic(0.8, 25);
    let b = solve_fluxonium(&p).unwrap();
    let r = flux_gauge_unitary(&p, &b).unwrap();
    assert!(r.unitarity_defect() < 1e-10);
    let sz = kron(&pauli().z.scale_real(b.omega_10() / 2.0), &OperatorMatrix::identity(26)).unwrap();
    let e = hermitian_eigvals(&conjugate(&r, &sz).unwrap()).unwrap();
    let half = b.omega_10() / 2.0;
    assert!(e[..26].iter().all(|v| (v + half).abs() < 1e-12));
    assert!(e[26..].iter().all(|v| (v - half).abs() < 1e-12));
}

#[test]
fn charge_squared_term_is_positive() {
    let ops = fock_ops(FockSpace::new(30).unwrap());
    let mut a_minus = ops.a.clone();
    a_minus.add_scaled(C64::new(-1.0, 0.0), &ops.a_dag);
    let term = a_minus.matmul(&a_minus).scale_real(-4.0 * 0.25 * 0.3 * 0.3);
    assert!(hermitian_eigvals(&term).unwrap()[0] > -1e-12);
}

#[test]
fn harmonic_limit_maps_onto_rabi_models() {
    let base = FluxoniumParams::new(0.3, 0.2, 0.0, 60, 1.0, 0.0, 40).unwrap();
    let b = solve_fluxonium(&base).unwrap();
    for chi0 in [0.2, 0.6] {
        let p = base.with_chi0(chi0);
        let eta = b.g_c(chi0) / b.omega_10();
        let rabi = RabiParams::new(1.0, b.omega_10(), eta, 40).unwrap();
        let fs = hermitian_eigvals(&build_flux_charge_standard(&p, &b).unwrap()).unwrap();
        let rs = hermitian_eigvals(&build_h_c_standard(&rabi, None).unwrap()).unwrap();
        assert!(max_abs_diff_sorted(&fs, &rs) < 1e-10);
        let fc = hermitian_eigvals(&build_flux_charge_correct(&p, &b, FluxMethod::ClosedForm).unwrap()).unwrap();
        let rc = hermitian_eigvals(&build_h_c_correct(&rabi, CorrectMethod::ClosedForm).unwrap()).unwrap();
        assert!(max_abs_diff_sorted(&fc, &rc) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn builders_are_hermitian_and_routes_agree(chi0 in 0.0f64..1.5, cutoff in 1usize..30) {
        let p = anharmonic(chi0, cutoff);
        let b = solve_fluxonium(&p).unwrap();
        let s = build_flux_charge_standard(&p, &b).unwrap();
        let c = build_flux_charge_correct(&p, &b, FluxMethod::Conjugation).unwrap();
        let k = build_flux_charge_correct(&p, &b, FluxMethod::ClosedForm).unwrap();
        prop_assert!(s.hermiticity_defect() <= 1e-12 * s.max_abs());
        prop_assert!(c.hermiticity_defect() <= 1e-12 * c.max_abs());
        prop_assert!(c.max_abs_diff(&k) < 1e-9);
    }
}
