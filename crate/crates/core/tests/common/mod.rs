//! Independent reference implementations used only by the test suites.
#![allow(dead_code)]

use cqed_core::{OperatorMatrix, C64};
use rand::Rng;

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> OperatorMatrix {
    let m = OperatorMatrix::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.hermitian_part()
}

pub fn random_real_symmetric<R: Rng>(rng: &mut R, n: usize) -> OperatorMatrix {
    let m = OperatorMatrix::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), 0.0));
    m.hermitian_part()
}

/// Cyclic complex Jacobi sweeps on a Hermitian matrix; returns sorted
/// eigenvalues. Deliberately naive and unrelated to the production solver.
pub fn jacobi_eigenvalues(h: &OperatorMatrix) -> Vec<f64> {
    let n = h.dim();
    let mut a: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| h.get(i, j)).collect()).collect();
    let total: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[p][q];
                let babs = b.norm();
                if babs < 1e-300 {
                    continue;
                }
                let phase = b / babs; // e^{iφ}
                let theta = (a[q][q].re - a[p][p].re) / (2.0 * babs);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = phase.conj() * (-s);
                let jqq = phase.conj() * c;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * jpp + y * jqp;
                    row[q] = x * jpq + y * jqq;
                }
                for k in 0..n {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = jpp.conj() * x + jqp.conj() * y;
                    a[q][k] = jpq.conj() * x + jqq.conj() * y;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// `exp(iθA)` by scaling and squaring an order-20 Taylor polynomial.
pub fn taylor_expm_i(a: &OperatorMatrix, theta: f64) -> OperatorMatrix {
    let n = a.dim();
    let norm = a.frobenius_norm() * theta.abs();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a.scale(C64::new(0.0, theta * scale));
    let mut term = OperatorMatrix::identity(n);
    let mut sum = OperatorMatrix::identity(n);
    for k in 1..=20 {
        term = term.matmul(&x).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// Position quadrature `a + a†` on the Fock space `|0>..|cutoff>`, built
/// directly from the ladder matrix elements.
pub fn position_quadrature(cutoff: usize) -> OperatorMatrix {
    let n = cutoff + 1;
    OperatorMatrix::from_fn(n, |i, j| {
        if i + 1 == j {
            C64::new((j as f64).sqrt(), 0.0)
        } else if j + 1 == i {
            C64::new((i as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn max_abs_diff_sorted(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
