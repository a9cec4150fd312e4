use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::math;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative asymmetry allowed on matrices that carry the Hermitian hint.
pub const HERMITIAN_HINT_TOL: f64 = 1e-12;

/// Dense square complex matrix acting on a finite Hilbert space.
///
/// Entries are stored row-major. The `hermitian` flag is only ever set by
/// constructors that guarantee it, either by construction or by explicitly
/// symmetrising (see [`OperatorMatrix::hermitian_part`]).
#[derive(Clone)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<C64>,
    hermitian: bool,
}

/// Entrywise equality; the Hermitian hint is a cache and does not participate.
impl PartialEq for OperatorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.data == other.data
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorMatrix")
            .field("dim", &self.dim)
            .field("hermitian", &self.hermitian)
            .finish_non_exhaustive()
    }
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be at least 1");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        let n = m.dim;
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a general (non-Hermitian) matrix from `f(row, col)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim >= 1, "operator dimension must be at least 1");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self {
            dim,
            data,
            hermitian: false,
        }
    }

    /// Builds a matrix from a row-major entry vector.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self {
            dim,
            data,
            hermitian: false,
        })
    }

    /// Real row-major entries.
    pub fn from_real_row_major(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[C64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn column(&self, col: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, col)).collect()
    }

    #[inline]
    pub fn hermitian_hint(&self) -> bool {
        self.hermitian
    }

    /// True when every entry has a vanishing imaginary part.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// `(M + M†)/2`, flagged Hermitian.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            let d = self.data[i * n + i];
            out.data[i * n + i] = C64::new(d.re, 0.0);
            for j in 0..i {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                out.data[i * n + j] = avg;
                out.data[j * n + i] = avg.conj();
            }
        }
        out.hermitian = true;
        out
    }

    /// Largest `|M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Checks Hermiticity to `tol · ‖M‖_max` and returns the flagged matrix.
    pub fn assert_hermitian(self, tol: f64) -> Result<Self> {
        if self.hermitian {
            return Ok(self);
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let asym = self.hermiticity_defect();
        if asym > tol * scale {
            return Err(Error::NonHermitian {
                asymmetry: asym,
                tolerance: tol * scale,
            });
        }
        Ok(self.hermitian_part())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out.hermitian = self.hermitian;
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `‖M‖_max`, the largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn scale(&self, factor: C64) -> Self {
        let hermitian = self.hermitian && factor.im == 0.0;
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
            hermitian,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
            hermitian: self.hermitian,
        }
    }

    /// `self + factor · other`, in place.
    pub fn add_scaled(&mut self, factor: C64, other: &Self) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let hermitian = self.hermitian && other.hermitian && factor.im == 0.0;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
        self.hermitian = hermitian;
    }

    /// Matrix product. Panics on dimension mismatch; see [`Self::try_matmul`].
    pub fn matmul(&self, rhs: &Self) -> Self {
        self.try_matmul(rhs).expect("dimension mismatch in matmul")
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            dim: n,
            data: out,
            hermitian: false,
        })
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Square sub-block on the given row/column index set.
    pub fn principal_block(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut out = Self::zeros(k);
        for (bi, &i) in indices.iter().enumerate() {
            for (bj, &j) in indices.iter().enumerate() {
                out.data[bi * k + bj] = self.get(i, j);
            }
        }
        out.hermitian = self.hermitian;
        out
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.adjoint().matmul(self);
        prod.max_abs_diff(&Self::identity(self.dim))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub(crate) fn with_hint(mut self, hermitian: bool) -> Self {
        self.hermitian = hermitian;
        self
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = self.clone();
        out.add_scaled(ONE, rhs);
        out
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

impl Mul<f64> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: f64) -> OperatorMatrix {
        self.scale_real(rhs)
    }
}

impl Mul<C64> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: C64) -> OperatorMatrix {
        self.scale(rhs)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale_real(-1.0)
    }
}

/// Accumulates `Σ c_k · M_k` for Hermitian-building code paths.
///
/// The result keeps the Hermitian hint only if every term is Hermitian with a
/// real coefficient.
#[derive(Debug)]
pub struct OperatorSum {
    acc: OperatorMatrix,
}

impl OperatorSum {
    pub fn new(dim: usize) -> Self {
        Self {
            acc: OperatorMatrix::zeros(dim),
        }
    }

    pub fn add(mut self, coeff: f64, term: &OperatorMatrix) -> Self {
        self.acc.add_scaled(C64::new(coeff, 0.0), term);
        self
    }

    pub fn add_complex(mut self, coeff: C64, term: &OperatorMatrix) -> Self {
        self.acc.add_scaled(coeff, term);
        self
    }

    pub fn finish(self) -> OperatorMatrix {
        self.acc
    }
}
