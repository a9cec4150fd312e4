use alloc::vec;

use num_complex::Complex64 as C64;

use super::eigen::{hermitian_eig, Spectrum};
use super::matrix::OperatorMatrix;
use crate::error::{Error, Result};
use crate::math;

/// Default cap on the dimension produced by [`kron`].
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Largest `‖U†U − I‖_max` accepted by [`conjugate`].
pub const UNITARITY_TOL: f64 = 1e-8;

/// `V f(Λ) V†` for Hermitian `h = V Λ V†` and an arbitrary complex-valued `f`.
pub fn spectral_map(h: &OperatorMatrix, f: impl Fn(f64) -> C64) -> Result<OperatorMatrix> {
    let spectrum = hermitian_eig(h)?;
    let fvals: alloc::vec::Vec<C64> = spectrum.eigenvalues().iter().map(|&x| f(x)).collect();
    reconstruct(&spectrum, &fvals)
}

/// `V diag(values) V†` from an existing decomposition, so several functions
/// of one operator share a single diagonalization.
pub fn reconstruct(spectrum: &Spectrum, values: &[C64]) -> Result<OperatorMatrix> {
    let v = spectrum.eigenvectors().ok_or(Error::InvalidParameter {
        name: "spectrum",
        reason: "eigenvectors were not retained".into(),
    })?;
    let n = v.dim();
    if values.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: values.len(),
        });
    }
    // out = (V · diag f) · V†, accumulated row by row.
    let vs = v.as_slice();
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    let mut scaled = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        for k in 0..n {
            scaled[k] = vs[i * n + k] * values[k];
        }
        let out_row = &mut out[i * n..(i + 1) * n];
        for (j, o) in out_row.iter_mut().enumerate() {
            let vj = &vs[j * n..(j + 1) * n];
            let mut acc = C64::new(0.0, 0.0);
            for (s, b) in scaled.iter().zip(vj) {
                acc += s * b.conj();
            }
            *o = acc;
        }
    }
    OperatorMatrix::from_row_major(n, out)
}

/// `f(H)` for a real scalar map; the result is flagged Hermitian.
pub fn matrix_function(h: &OperatorMatrix, f: impl Fn(f64) -> f64) -> Result<OperatorMatrix> {
    Ok(spectral_map(h, |x| C64::new(f(x), 0.0))?.hermitian_part())
}

/// `exp(iθA)` for Hermitian `A`, unitary by construction.
pub fn unitary_exp(a: &OperatorMatrix, theta: f64) -> Result<OperatorMatrix> {
    if theta == 0.0 {
        return Ok(OperatorMatrix::identity(a.dim()));
    }
    spectral_map(a, |x| {
        let phase = theta * x;
        C64::new(math::cos(phase), math::sin(phase))
    })
}

/// `U H U†`. Fails when `U` is not unitary to [`UNITARITY_TOL`].
pub fn conjugate(u: &OperatorMatrix, h: &OperatorMatrix) -> Result<OperatorMatrix> {
    if u.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: h.dim(),
        });
    }
    let defect = u.unitarity_defect();
    if defect > UNITARITY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    let out = u.matmul(h).matmul(&u.adjoint());
    Ok(if h.hermitian_hint() { out.hermitian_part() } else { out })
}

/// Kronecker product `A ⊗ B` with the default dimension cap.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    kron_with_cap(a, b, DEFAULT_DIM_CAP)
}

pub fn kron_with_cap(a: &OperatorMatrix, b: &OperatorMatrix, cap: usize) -> Result<OperatorMatrix> {
    let (na, nb) = (a.dim(), b.dim());
    let dim = na.checked_mul(nb).unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::DimensionOverflow { dim, cap });
    }
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for ia in 0..na {
        for ja in 0..na {
            let x = a.get(ia, ja);
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..nb {
                let row = (ia * nb + ib) * dim + ja * nb;
                for jb in 0..nb {
                    data[row + jb] = x * b.get(ib, jb);
                }
            }
        }
    }
    Ok(OperatorMatrix::from_row_major(dim, data)?.with_hint(a.hermitian_hint() && b.hermitian_hint()))
}
