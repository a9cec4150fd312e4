//! Dense Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit-shift QL iterations.
//!
//! Real symmetric input takes a real-arithmetic path; complex Hermitian input
//! is reduced with complex reflectors chosen so the tridiagonal is real.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64 as C64;

use super::matrix::OperatorMatrix;
use crate::error::{Error, Result};
use crate::math;

/// Relative asymmetry tolerated on matrices without the Hermitian hint.
pub const HERMITICITY_CHECK_TOL: f64 = 1e-10;

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_QL_ITERATIONS: usize = 100;

/// Sorted real spectrum with optional eigenvectors and provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Option<OperatorMatrix>,
    model_id: String,
    cutoff: usize,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors stored as the columns of a unitary matrix.
    pub fn eigenvectors(&self) -> Option<&OperatorMatrix> {
        self.eigenvectors.as_ref()
    }

    pub fn eigenvector(&self, k: usize) -> Option<Vec<C64>> {
        self.eigenvectors.as_ref().map(|v| v.column(k))
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `E_n − E_0` for `n = 1..=count` (fewer if the spectrum is shorter).
    pub fn transitions(&self, count: usize) -> Vec<f64> {
        transitions(&self.eigenvalues, count)
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn with_metadata(mut self, model_id: impl Into<String>, cutoff: usize) -> Self {
        self.model_id = model_id.into();
        self.cutoff = cutoff;
        self
    }

    pub fn into_parts(self) -> (Vec<f64>, Option<OperatorMatrix>) {
        (self.eigenvalues, self.eigenvectors)
    }
}

/// `E_n − E_0` for `n = 1..=count` from an ascending eigenvalue list.
pub fn transitions(sorted: &[f64], count: usize) -> Vec<f64> {
    let e0 = sorted[0];
    sorted.iter().skip(1).take(count).map(|e| e - e0).collect()
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending; each eigenvector is phase-fixed so that its
/// largest-magnitude component is real and positive.
pub fn hermitian_eig(h: &OperatorMatrix) -> Result<Spectrum> {
    let (values, vectors) = decompose(h, true)?;
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: vectors,
        model_id: String::new(),
        cutoff: 0,
    })
}

/// Eigenvalues only, ascending. Skips eigenvector accumulation.
pub fn hermitian_eigvals(h: &OperatorMatrix) -> Result<Vec<f64>> {
    decompose(h, false).map(|(v, _)| v)
}

fn decompose(h: &OperatorMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<OperatorMatrix>)> {
    check_hermitian(h)?;
    let n = h.dim();
    if h.is_real() {
        let mut a: Vec<f64> = h.as_slice().iter().map(|z| z.re).collect();
        let (vals, rows) = solve::<f64>(&mut a, n, want_vectors)?;
        let vecs = rows.map(|rows| {
            let complex: Vec<Vec<C64>> = rows
                .into_iter()
                .map(|r| r.into_iter().map(|x| C64::new(x, 0.0)).collect())
                .collect();
            assemble(complex, n)
        });
        Ok((vals, vecs))
    } else {
        let mut a: Vec<C64> = h.as_slice().to_vec();
        let (vals, rows) = solve::<C64>(&mut a, n, want_vectors)?;
        Ok((vals, rows.map(|rows| assemble(rows, n))))
    }
}

fn check_hermitian(h: &OperatorMatrix) -> Result<()> {
    if h.hermitian_hint() {
        return Ok(());
    }
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let asym = h.hermiticity_defect();
    if asym > HERMITICITY_CHECK_TOL * scale {
        return Err(Error::NonHermitian {
            asymmetry: asym,
            tolerance: HERMITICITY_CHECK_TOL * scale,
        });
    }
    Ok(())
}

/// Packs eigenvector rows (one per eigenvalue) into a column matrix after
/// fixing phases.
fn assemble(mut rows: Vec<Vec<C64>>, n: usize) -> OperatorMatrix {
    for row in rows.iter_mut() {
        fix_phase(row);
    }
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for (k, row) in rows.iter().enumerate() {
        for (i, &z) in row.iter().enumerate() {
            data[i * n + k] = z;
        }
    }
    OperatorMatrix::from_row_major(n, data).expect("square by construction")
}

/// Rotates `v` so its largest-magnitude component is real positive. Ties
/// within a relative 1e-8 go to the lowest index.
pub(crate) fn fix_phase(v: &mut [C64]) {
    let max2 = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm_sqr()));
    if max2 == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm_sqr() >= max2 * (1.0 - 1e-8))
        .expect("nonempty");
    let z = v[pivot];
    let phase = z.conj() / z.norm();
    for x in v.iter_mut() {
        *x *= phase;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

/// Field operations the reduction needs, implemented for `f64` and `C64`.
pub(crate) trait Scalar:
    Copy
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const ZERO: Self;
    fn from_re(x: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;
    fn abs2(self) -> f64;
    fn recip(self) -> Self;
    fn scale(self, s: f64) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    #[inline]
    fn from_re(x: f64) -> Self {
        x
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs2(self) -> f64 {
        self * self
    }
    #[inline]
    fn recip(self) -> Self {
        1.0 / self
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for C64 {
    const ZERO: Self = C64::new(0.0, 0.0);
    #[inline]
    fn from_re(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    #[inline]
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn recip(self) -> Self {
        let d = self.norm_sqr();
        C64::new(self.re / d, -self.im / d)
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        C64::new(self.re * s, self.im * s)
    }
}

struct Reflector<S> {
    start: usize,
    tau: S,
    v: Vec<S>,
}

type Decomposition<S> = (Vec<f64>, Option<Vec<Vec<S>>>);

/// Eigen-solves the Hermitian matrix stored row-major in `a` (only the lower
/// triangle is read; `a` is overwritten). Returns ascending eigenvalues and,
/// if requested, eigenvector rows in the same order.
fn solve<S: Scalar>(a: &mut [S], n: usize, want_vectors: bool) -> Result<Decomposition<S>> {
    let (mut d, mut e, reflectors) = tridiagonalize(a, n);
    let mut z = if want_vectors {
        let mut z = vec![0.0f64; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        Some(z)
    } else {
        None
    };
    tridiagonal_ql(&mut d, &mut e, z.as_deref_mut(), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();

    let vectors = z.map(|z| {
        order
            .iter()
            .map(|&k| {
                let mut u: Vec<S> = z[k * n..(k + 1) * n].iter().map(|&x| S::from_re(x)).collect();
                for r in reflectors.iter().rev() {
                    apply_reflector(r, &mut u);
                }
                u
            })
            .collect()
    });
    Ok((values, vectors))
}

/// `u ← (I − τ v v^H) u` on the tail starting at `r.start`.
fn apply_reflector<S: Scalar>(r: &Reflector<S>, u: &mut [S]) {
    let tail = &mut u[r.start..];
    let mut s = S::ZERO;
    for (vi, ui) in r.v.iter().zip(tail.iter()) {
        s += vi.conj() * *ui;
    }
    if s == S::ZERO {
        return;
    }
    let ts = r.tau * s;
    for (vi, ui) in r.v.iter().zip(tail.iter_mut()) {
        *ui -= *vi * ts;
    }
}

/// Reduces the Hermitian matrix to real tridiagonal form `Q^H A Q = T`.
/// Returns the diagonal, the sub-diagonal (`e[k]` couples `k` and `k+1`,
/// `e[n-1] = 0`) and the reflectors whose product is `Q`.
fn tridiagonalize<S: Scalar>(a: &mut [S], n: usize) -> (Vec<f64>, Vec<f64>, Vec<Reflector<S>>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut reflectors = Vec::new();
    let mut x = vec![S::ZERO; n];
    let mut w = vec![S::ZERO; n];

    for k in 0..n.saturating_sub(1) {
        d[k] = a[k * n + k].re();
        let r0 = k + 1;
        let m = n - r0;
        let alpha = a[r0 * n + k];
        let xnorm2: f64 = (r0 + 1..n).map(|i| a[i * n + k].abs2()).sum();
        if xnorm2 == 0.0 && alpha.im() == 0.0 {
            e[k] = alpha.re();
            continue;
        }
        let norm = math::sqrt(alpha.abs2() + xnorm2);
        let beta = if alpha.re() >= 0.0 { -norm } else { norm };
        let tau = (S::from_re(beta) - alpha).scale(1.0 / beta);
        let inv = (alpha - S::from_re(beta)).recip();
        let mut v = Vec::with_capacity(m);
        v.push(S::from_re(1.0));
        for i in r0 + 1..n {
            v.push(a[i * n + k] * inv);
        }
        e[k] = beta;

        // x = tau * B v with B the trailing block (lower triangle stored).
        let x = &mut x[..m];
        x.iter_mut().for_each(|s| *s = S::ZERO);
        for ii in 0..m {
            let row = &a[(r0 + ii) * n + r0..(r0 + ii) * n + r0 + ii + 1];
            let vi = v[ii];
            let mut acc = S::ZERO;
            for jj in 0..ii {
                let aij = row[jj];
                acc += aij * v[jj];
                x[jj] += aij.conj() * vi;
            }
            acc += S::from_re(row[ii].re()) * vi;
            x[ii] += acc;
        }
        for s in x.iter_mut() {
            *s = tau * *s;
        }
        // w = x − ½ τ (x^H v) v
        let mut xv = S::ZERO;
        for (xi, vi) in x.iter().zip(&v) {
            xv += xi.conj() * *vi;
        }
        let half = (tau * xv).scale(-0.5);
        let w = &mut w[..m];
        for ((wi, xi), vi) in w.iter_mut().zip(x.iter()).zip(&v) {
            *wi = *xi + half * *vi;
        }
        // B ← B − v w^H − w v^H (lower triangle)
        for ii in 0..m {
            let row = &mut a[(r0 + ii) * n + r0..(r0 + ii) * n + r0 + ii + 1];
            let vi = v[ii];
            let wi = w[ii];
            for jj in 0..=ii {
                row[jj] -= vi * w[jj].conj() + wi * v[jj].conj();
            }
            row[ii] = S::from_re(row[ii].re());
        }
        reflectors.push(Reflector { start: r0, tau, v });
    }
    if n > 0 {
        d[n - 1] = a[(n - 1) * n + n - 1].re();
    }
    (d, e, reflectors)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix (EISPACK `tql2`
/// lineage). `z`, when present, holds eigenvector rows and is rotated in
/// place; row `k` ends up as the eigenvector for `d[k]`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>, n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(math::abs(d[l]) + math::abs(e[l]));
        let mut m = l;
        while m < n - 1 && math::abs(e[m]) > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::ConvergenceFailure {
                        index: l,
                        iterations: MAX_QL_ITERATIONS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = math::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = math::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if math::abs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
