mod common;

use common::{jacobi_eigenvalues, max_abs_diff_sorted};
use cqed_core::linalg::{hermitian_eigvals, transitions};
use cqed_core::particle1d::*;
use cqed_core::rabi::{build_h_c_standard, build_h_d, RabiParams};
use cqed_core::{OperatorMatrix, C64};
use proptest::prelude::*;
use std::sync::OnceLock;

fn harmonic() -> &'static (ParticleModel, MatterBasis) {
    static CELL: OnceLock<(ParticleModel, MatterBasis)> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = ParticleModel::harmonic_preset();
        let b = solve_particle(&m).unwrap();
        (m, b)
    })
}

fn double_well() -> &'static (ParticleModel, MatterBasis) {
    static CELL: OnceLock<(ParticleModel, MatterBasis)> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = ParticleModel::double_well_preset();
        let b = solve_particle(&m).unwrap();
        (m, b)
    })
}

/// `−2.5x² + 0.5x⁴` in a harmonic-oscillator basis of frequency `Ω`. Powers
/// of `x` and `p²` are formed in a larger basis and then truncated, so no
/// grid or finite differences are involved.
fn double_well_ho_oracle(size: usize, omega: f64) -> OperatorMatrix {
    let big = size + 8;
    let mut x = vec![vec![0.0f64; big]; big];
    let mut p2 = vec![vec![0.0f64; big]; big];
    let s = 1.0 / (2.0 * omega).sqrt();
    for n in 0..big {
        if n + 1 < big {
            let v = ((n + 1) as f64).sqrt() * s;
            x[n][n + 1] = v;
            x[n + 1][n] = v;
        }
        // p² = (Ω/2)(2n + 1 − a² − a†²)
        p2[n][n] = omega / 2.0 * (2 * n + 1) as f64;
        if n + 2 < big {
            let v = -omega / 2.0 * (((n + 1) * (n + 2)) as f64).sqrt();
            p2[n][n + 2] = v;
            p2[n + 2][n] = v;
        }
    }
    let mul = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        (0..big)
            .map(|i| (0..big).map(|j| (0..big).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    };
    let x2 = mul(&x, &x);
    let x4 = mul(&x2, &x2);
    OperatorMatrix::from_fn(size, |i, j| {
        C64::new(0.5 * p2[i][j] - 2.5 * x2[i][j] + 0.5 * x4[i][j], 0.0)
    })
}

// Converged double-well reference: HO-basis numpy diagonalization (sizes 200
// and 300, Ω ∈ {4, 6}) agreeing to 1e-12; grid n = 3201 agrees to 1e-9.
const DW_OMEGA10: f64 = 0.0797336994751987;
const DW_OMEGA21: f64 = 1.9447974630366334;
const DW_D10: f64 = 1.3823160523854978;

#[test]
fn harmonic_levels_and_dipole() {
    let (_, b) = harmonic();
    for (n, e) in b.energies.iter().take(6).enumerate() {
        let exact = n as f64 + 0.5;
        assert!(((e - exact) / exact).abs() < 1e-6, "level {n}: {e}");
    }
    assert!((b.x10().abs() - 0.5f64.sqrt()).abs() < 1e-6);
    assert!(b.x10() > 0.0);
}

#[test]
fn orthonormal_under_trapezoid_rule() {
    let (_, b) = double_well();
    let h = b.grid.spacing();
    let n = b.grid.n_points;
    for i in 0..b.len() {
        for j in 0..=i {
            let (u, v) = (&b.wavefunctions[i], &b.wavefunctions[j]);
            let inner: f64 = (0..n)
                .map(|t| {
                    let w = if t == 0 || t == n - 1 { 0.5 } else { 1.0 };
                    w * u[t] * v[t]
                })
                .sum::<f64>()
                * h;
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((inner - target).abs() < 1e-9, "({i},{j}) {inner}");
        }
    }
}

#[test]
fn matrix_element_symmetries() {
    for (_, b) in [harmonic(), double_well()] {
        let m = b.len();
        for i in 0..m {
            for j in 0..m {
                let x = b.x_elems.get(i, j);
                let p = b.p_elems.get(i, j);
                assert_eq!(x.im, 0.0);
                assert_eq!(x, b.x_elems.get(j, i));
                assert!(p.re.abs() <= 1e-12 * b.p_elems.max_abs());
                assert!((p + b.p_elems.get(j, i)).norm() <= 1e-12 * b.p_elems.max_abs());
            }
        }
    }
}

#[test]
fn velocity_and_length_forms_agree() {
    for (model, b) in [harmonic(), double_well()] {
        let scale = b.x_elems.max_abs();
        for i in 0..5 {
            for j in 0..5 {
                let x = b.x_elems.get(i, j).re;
                if i == j || x.abs() < 1e-6 * scale {
                    continue;
                }
                let expected = C64::new(0.0, model.mass * b.omega(i, j) * x);
                let ratio = b.p_elems.get(i, j) / expected;
                assert!((ratio - C64::new(1.0, 0.0)).norm() < 0.01, "({i},{j}) {ratio}");
            }
        }
    }
}

#[test]
fn double_well_golden_values() {
    let (_, b) = double_well();
    assert!((b.omega_10() - DW_OMEGA10).abs() < 1e-8, "{}", b.omega_10());
    assert!((b.omega(2, 1) - DW_OMEGA21).abs() < 1e-7, "{}", b.omega(2, 1));
    assert!((b.x10() - DW_D10).abs() < 1e-7, "{}", b.x10());
    assert!(b.omega(2, 1) / b.omega_10() >= 4.0);
}

#[test]
fn double_well_against_oscillator_basis_oracle() {
    let vals = jacobi_eigenvalues(&double_well_ho_oracle(120, 4.0));
    assert!((vals[1] - vals[0] - DW_OMEGA10).abs() < 1e-10);
    assert!((vals[2] - vals[1] - DW_OMEGA21).abs() < 1e-10);
    let (_, b) = double_well();
    assert!((b.omega_10() - (vals[1] - vals[0])).abs() < 1e-8);
}

#[test]
fn trk_sum_rule() {
    let (hm, hb) = harmonic();
    assert!((trk_sum_levels(hb, hm, 2) - 1.0).abs() < 1e-6);
    let (dm, db) = double_well();
    let s = trk_sum(db, dm);
    assert!(s >= 0.999 && s <= 1.0 + 1e-6, "{s}");
    let partial: Vec<f64> = (1..=db.len()).map(|m| trk_sum_levels(db, dm, m)).collect();
    assert!(partial.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn nonlocal_kernel_concentrates_with_more_levels() {
    let (m, b) = harmonic();
    let r: Vec<f64> = [2, 4, 8, 16, 32]
        .iter()
        .map(|&k| nonlocal_kernel(b, m, k).unwrap().off_diagonality)
        .collect();
    assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
}

#[test]
fn two_level_kernel_is_symmetric_rank_two() {
    let model = ParticleModel::new(
        Grid::symmetric(8.0, 801).unwrap(),
        Potential::DoubleWell { mu: 1.0, lambda: 0.25 },
        1.0,
        1.0,
        4,
    )
    .unwrap();
    let b = solve_particle(&model).unwrap();
    let k = nonlocal_kernel(&b, &model, 2).unwrap();
    for i in 0..k.n {
        for j in 0..k.n {
            assert_eq!(k.get(i, j), k.get(j, i));
        }
    }
    let dense = OperatorMatrix::from_fn(k.n, |i, j| C64::new(k.get(i, j), 0.0));
    let sv = hermitian_eigvals(&dense).unwrap();
    let top = sv.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let rank = sv.iter().filter(|s| s.abs() > 1e-10 * top).count();
    assert!(rank <= 2, "rank {rank}");
}

#[test]
fn minimal_coupling_identity_on_shipped_grid() {
    let r = check_minimal_coupling_identity(&ParticleModel::identity_preset(), 0.3).unwrap();
    assert!(r.full_relative <= 1e-6, "{r:?}");
    assert!(r.projected_relative <= 1e-9, "{r:?}");
    assert!(r.spectral_deviation <= 1e-9, "{r:?}");
}

#[test]
fn full_models_decouple_at_zero_field() {
    let (m, b) = double_well();
    let c = FullCoupling {
        omega_c: 0.7,
        a0: 0.0,
        m_used: 4,
        cutoff: 5,
    };
    let mut expected = Vec::new();
    for e in &b.energies[..4] {
        for n in 0..6 {
            expected.push(e + 0.7 * n as f64);
        }
    }
    expected.sort_by(f64::total_cmp);
    for h in [
        build_full_h_d(m, b, &c, X2Mode::Exact).unwrap(),
        build_full_h_c(m, b, &c).unwrap(),
    ] {
        let v = hermitian_eigvals(&h).unwrap();
        assert!(max_abs_diff_sorted(&v, &expected) < 1e-12);
    }
}

fn gap(m: &ParticleModel, b: &MatterBasis, c: &FullCoupling) -> f64 {
    let d = transitions(
        &hermitian_eigvals(&build_full_h_d(m, b, c, X2Mode::Exact).unwrap()).unwrap(),
        6,
    );
    let cc = transitions(&hermitian_eigvals(&build_full_h_c(m, b, c).unwrap()).unwrap(), 6);
    max_abs_diff_sorted(&d, &cc) / c.omega_c
}

#[test]
fn two_level_reductions_match_rabi_builders() {
    for (m, b) in [harmonic(), double_well()] {
        let eta = 0.4;
        let a0 = a0_for_eta(b, m, eta);
        let c = FullCoupling {
            omega_c: 1.0,
            a0,
            m_used: 2,
            cutoff: 40,
        };
        let p = RabiParams::new(1.0, b.omega_10(), eta, 40).unwrap();
        let full_d = transitions(
            &hermitian_eigvals(&build_full_h_d(m, b, &c, X2Mode::Projected).unwrap()).unwrap(),
            6,
        );
        let rabi_d = transitions(&hermitian_eigvals(&build_h_d(&p).unwrap()).unwrap(), 6);
        assert!(max_abs_diff_sorted(&full_d, &rabi_d) < 1e-10);
        let dia = m.charge * m.charge * a0 * a0 / (2.0 * m.mass);
        let full_c = transitions(&hermitian_eigvals(&build_full_h_c(m, b, &c).unwrap()).unwrap(), 6);
        let rabi_c = transitions(
            &hermitian_eigvals(&build_h_c_standard(&p, Some(dia)).unwrap()).unwrap(),
            6,
        );
        // Residual comes from the grid velocity/length mismatch p₁₀ ≠ i m ω₁₀ x₁₀.
        assert!(max_abs_diff_sorted(&full_c, &rabi_c) < 1e-8);
    }
}

#[test]
fn harmonic_full_model_gauge_gap_closes() {
    let (m, b) = harmonic();
    let a0 = a0_for_eta(b, m, 0.5);
    let gaps: Vec<f64> = [2, 4, 8, 16, 32]
        .iter()
        .map(|&mu| {
            gap(
                m,
                b,
                &FullCoupling {
                    omega_c: b.omega_10(),
                    a0,
                    m_used: mu,
                    cutoff: 40,
                },
            )
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[4] <= 1e-4, "{gaps:?}");
}

#[test]
fn double_well_two_level_coulomb_stays_wrong() {
    let (m, b) = double_well();
    let a0 = a0_for_eta(b, m, 0.5);
    let two = gap(
        m,
        b,
        &FullCoupling {
            omega_c: b.omega_10(),
            a0,
            m_used: 2,
            cutoff: 40,
        },
    );
    let sixteen = gap(
        m,
        b,
        &FullCoupling {
            omega_c: b.omega_10(),
            a0,
            m_used: 16,
            cutoff: 40,
        },
    );
    assert!(two > 1.0, "{two}");
    assert!(sixteen < 1e-5, "{sixteen}");
}

#[test]
fn full_coupling_rejects_oversized_basis() {
    let (m, b) = harmonic();
    let c = FullCoupling {
        omega_c: 1.0,
        a0: 0.1,
        m_used: 40,
        cutoff: 4,
    };
    assert!(build_full_h_c(m, b, &c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn phase_conjugation_preserves_spectrum(q_a0 in -1.0f64..1.0) {
        let model = ParticleModel::new(Grid::symmetric(8.0, 401).unwrap(), Potential::Harmonic { omega0: 1.0 }, 1.0, 1.0, 6).unwrap();
        let r = check_minimal_coupling_identity(&model, q_a0).unwrap();
        prop_assert!(r.spectral_deviation < 1e-9);
    }

    #[test]
    fn full_builders_are_hermitian(eta in 0.0f64..1.0, m_used in 2usize..6, cutoff in 1usize..8) {
        let (m, b) = double_well();
        let c = FullCoupling { omega_c: 0.5, a0: a0_for_eta(b, m, eta), m_used, cutoff };
        for h in [
            build_full_h_d(m, b, &c, X2Mode::Exact).unwrap(),
            build_full_h_d(m, b, &c, X2Mode::Projected).unwrap(),
            build_full_h_c(m, b, &c).unwrap(),
        ] {
            prop_assert!(h.hermiticity_defect() <= 1e-12 * h.max_abs());
        }
    }
}
