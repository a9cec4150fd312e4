//! Hermitian band matrices and their lowest eigenpairs.
//!
//! Grid Hamiltonians are narrow-banded; storing only the lower band keeps
//! memory linear in the grid size and allows shift-invert iteration with a
//! banded Cholesky factor.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use super::eigen::hermitian_eig;
use super::matrix::OperatorMatrix;
use crate::error::{invalid, Error, Result};
use crate::math;

/// Hermitian matrix with `A[i][j] = 0` for `|i − j| > bandwidth`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedHermitian {
    n: usize,
    bw: usize,
    // lower[k * n + j] = A[j + k][j]
    lower: Vec<C64>,
}

impl BandedHermitian {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        assert!(n >= 1, "band matrix dimension must be at least 1");
        Self {
            n,
            bw: bandwidth,
            lower: vec![C64::new(0.0, 0.0); (bandwidth + 1) * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Sets `A[i][j]` (and implicitly `A[j][i] = conj`). Diagonal entries keep
    /// only their real part.
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        let (r, c, v) = if i >= j { (i, j, value) } else { (j, i, value.conj()) };
        let k = r - c;
        assert!(k <= self.bw && r < self.n, "entry ({i}, {j}) outside the band");
        self.lower[k * self.n + c] = if k == 0 { C64::new(v.re, 0.0) } else { v };
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (r, c, conj) = if i >= j { (i, j, false) } else { (j, i, true) };
        let k = r - c;
        if k > self.bw || r >= self.n {
            return C64::new(0.0, 0.0);
        }
        let v = self.lower[k * self.n + c];
        if conj {
            v.conj()
        } else {
            v
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.lower.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference; bandwidths may differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let bw = self.bw.max(other.bw);
        let mut worst = 0.0f64;
        for k in 0..=bw.min(self.n - 1) {
            for c in 0..self.n - k {
                worst = worst.max((self.get(c + k, c) - other.get(c + k, c)).norm());
            }
        }
        worst
    }

    /// `self + factor · other` for a real factor.
    pub fn add_scaled(&self, factor: f64, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let bw = self.bw.max(other.bw);
        let mut out = Self::zeros(self.n, bw);
        for k in 0..=bw.min(self.n - 1) {
            for c in 0..self.n - k {
                out.lower[k * self.n + c] = self.get(c + k, c) + other.get(c + k, c) * factor;
            }
        }
        out
    }

    /// `Φ A Φ†` for the diagonal unitary `Φ = diag(phases)`.
    pub fn conjugate_by_diagonal(&self, phases: &[C64]) -> Result<Self> {
        if phases.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: phases.len(),
            });
        }
        let mut out = self.clone();
        for k in 0..=self.bw.min(self.n - 1) {
            for c in 0..self.n - k {
                let idx = k * self.n + c;
                out.lower[idx] = phases[c + k] * self.lower[idx] * phases[c].conj();
            }
        }
        for c in 0..self.n {
            out.lower[c] = C64::new(out.lower[c].re, 0.0);
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            out[c] += self.lower[c] * v[c];
        }
        for k in 1..=self.bw.min(n - 1) {
            for c in 0..n - k {
                let a = self.lower[k * n + c];
                out[c + k] += a * v[c];
                out[c] += a.conj() * v[c + k];
            }
        }
        out
    }

    pub fn to_dense(&self) -> OperatorMatrix {
        OperatorMatrix::from_fn(self.n, |i, j| self.get(i, j)).hermitian_part()
    }

    /// `⟨u|A|v⟩`.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        dot(u, &self.mul_vec(v))
    }

    /// Cholesky factor of `A − σI`, or `None` when it is not positive definite.
    pub fn shifted_cholesky(&self, sigma: f64) -> Option<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        let mut l = vec![C64::new(0.0, 0.0); (bw + 1) * n];
        let at = |l: &Vec<C64>, i: usize, j: usize| l[(i - j) * n + j];
        for j in 0..n {
            let start = j.saturating_sub(bw);
            let mut d = self.lower[j].re - sigma;
            for k in start..j {
                d -= at(&l, j, k).norm_sqr();
            }
            if !(d > 0.0 && d.is_finite()) {
                return None;
            }
            let djj = math::sqrt(d);
            l[j] = C64::new(djj, 0.0);
            for i in j + 1..(j + bw + 1).min(n) {
                let mut s = self.lower[(i - j) * n + j];
                for k in i.saturating_sub(bw)..j {
                    s -= at(&l, i, k) * at(&l, j, k).conj();
                }
                l[(i - j) * n + j] = s / djj;
            }
        }
        Some(BandCholesky { n, bw, l })
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.n;
        let mut radius = vec![0.0f64; n];
        for k in 1..=self.bw.min(n - 1) {
            for c in 0..n - k {
                let a = self.lower[k * n + c].norm();
                radius[c] += a;
                radius[c + k] += a;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in 0..n {
            lo = lo.min(self.lower[c].re - radius[c]);
            hi = hi.max(self.lower[c].re + radius[c]);
        }
        (lo, hi)
    }
}

/// Lower band factor `L` with `A − σI = L L†`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<C64>,
}

impl BandCholesky {
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let (n, bw) = (self.n, self.bw);
        assert_eq!(b.len(), n, "dimension mismatch");
        let at = |i: usize, j: usize| self.l[(i - j) * n + j];
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(bw)..i {
                s -= at(i, k) * b[k];
            }
            b[i] = s / at(i, i);
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= at(k, i).conj() * b[k];
            }
            b[i] = s / at(i, i);
        }
    }
}

fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[C64]) -> f64 {
    math::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// Orthonormalises the columns in place (two passes of modified Gram–Schmidt).
fn orthonormalize(cols: &mut [Vec<C64>]) -> Result<()> {
    for j in 0..cols.len() {
        for _pass in 0..2 {
            for i in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let proj = dot(&head[i], &tail[0]);
                for (t, h) in tail[0].iter_mut().zip(&head[i]) {
                    *t -= proj * h;
                }
            }
        }
        let nrm = norm(&cols[j]);
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(invalid("block", "iteration block lost rank"));
        }
        for z in cols[j].iter_mut() {
            *z /= nrm;
        }
    }
    Ok(())
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// Lowest eigenpairs of a band matrix.
#[derive(Debug, Clone)]
pub struct BandEigen {
    pub values: Vec<f64>,
    /// Unit eigenvectors, one per value.
    pub vectors: Vec<Vec<C64>>,
    pub iterations: usize,
}

const MAX_SUBSPACE_ITERATIONS: usize = 500;

/// The `count` lowest eigenpairs via shift-invert subspace iteration with
/// Rayleigh–Ritz. The shift is placed just below the spectrum by bisecting
/// on the success of the banded Cholesky factorization.
pub fn lowest_eigenpairs(a: &BandedHermitian, count: usize) -> Result<BandEigen> {
    let n = a.dim();
    if count == 0 || count > n {
        return Err(invalid("count", "must lie in 1..=dim"));
    }
    if n <= 2 * count + 8 {
        let spec = hermitian_eig(&a.to_dense())?;
        let v = spec.eigenvectors().expect("requested eigenvectors");
        return Ok(BandEigen {
            values: spec.eigenvalues()[..count].to_vec(),
            vectors: (0..count).map(|k| v.column(k)).collect(),
            iterations: 0,
        });
    }

    let (mut lo, _) = a.gershgorin_bounds();
    let mut hi = (0..n).map(|i| a.get(i, i).re).fold(f64::INFINITY, f64::min);
    lo -= 1.0 + math::abs(lo) * 1e-12;
    for _ in 0..200 {
        if hi - lo <= 1e-10 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if a.shifted_cholesky(mid).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = lo - 1e-6 * lo.abs().max(1.0);
    let chol = a.shifted_cholesky(sigma).ok_or(Error::ConvergenceFailure {
        index: 0,
        iterations: 0,
    })?;

    let block = (2 * count + 8).min(n);
    let mut seed = 0x5EED_u64 ^ n as u64;
    let mut cols: Vec<Vec<C64>> = (0..block)
        .map(|_| (0..n).map(|_| C64::new(splitmix(&mut seed), 0.0)).collect())
        .collect();
    orthonormalize(&mut cols)?;

    let scale = a.max_abs().max(1.0);
    let tol = 1e-12 * scale;
    let mut values = Vec::new();
    for iter in 1..=MAX_SUBSPACE_ITERATIONS {
        for c in cols.iter_mut() {
            chol.solve_in_place(c);
        }
        orthonormalize(&mut cols)?;
        let images: Vec<Vec<C64>> = cols.iter().map(|c| a.mul_vec(c)).collect();
        let small = OperatorMatrix::from_fn(block, |i, j| dot(&cols[i], &images[j])).hermitian_part();
        let ritz = hermitian_eig(&small)?;
        let w = ritz.eigenvectors().expect("requested eigenvectors");
        let rotate = |src: &[Vec<C64>]| -> Vec<Vec<C64>> {
            (0..block)
                .map(|k| {
                    let mut out = vec![C64::new(0.0, 0.0); n];
                    for (j, s) in src.iter().enumerate() {
                        let coeff = w.get(j, k);
                        for (o, x) in out.iter_mut().zip(s) {
                            *o += coeff * x;
                        }
                    }
                    out
                })
                .collect()
        };
        cols = rotate(&cols);
        let images = rotate(&images);
        values = ritz.eigenvalues().to_vec();
        let worst = (0..count)
            .map(|k| {
                let r: Vec<C64> = images[k]
                    .iter()
                    .zip(&cols[k])
                    .map(|(ax, x)| ax - x * values[k])
                    .collect();
                norm(&r)
            })
            .fold(0.0, f64::max);
        if worst <= tol {
            values.truncate(count);
            cols.truncate(count);
            return Ok(BandEigen {
                values,
                vectors: cols,
                iterations: iter,
            });
        }
    }
    let _ = values;
    Err(Error::ConvergenceFailure {
        index: count - 1,
        iterations: MAX_SUBSPACE_ITERATIONS,
    })
}
