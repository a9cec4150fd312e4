//! Dense complex linear algebra: Hermitian eigendecomposition, matrix
//! functions through the spectral decomposition, Kronecker products and
//! unitary conjugation, plus a band-matrix path for large grid operators.
//!
//! Composite-space operators are dense; their dimensions stay in the low
//! thousands. Grid Hamiltonians use [`BandedHermitian`].

mod banded;
mod eigen;
mod functions;
mod matrix;

pub use banded::{lowest_eigenpairs, BandCholesky, BandEigen, BandedHermitian};
pub use eigen::{hermitian_eig, hermitian_eigvals, transitions, Spectrum, HERMITICITY_CHECK_TOL};
pub use functions::{
    conjugate, kron, kron_with_cap, matrix_function, reconstruct, spectral_map, unitary_exp, DEFAULT_DIM_CAP,
    UNITARITY_TOL,
};
pub use matrix::{OperatorMatrix, OperatorSum, HERMITIAN_HINT_TOL};
pub use num_complex::Complex64 as C64;
