use alloc::string::String;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} exceeds {tolerance:e})")]
    NonHermitian { asymmetry: f64, tolerance: f64 },
    #[error("eigensolver did not converge for eigenvalue {index} within {iterations} iterations")]
    ConvergenceFailure { index: usize, iterations: usize },
    #[error("matrix is not unitary (max |U†U - I| = {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionOverflow { dim: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("grid too coarse: level {level} moves by an estimated {shift:e} under refinement")]
    GridTooCoarse { level: usize, shift: f64 },
    #[error("level {level} leaks to the grid boundary (|psi| = {amplitude:e})")]
    BoundaryLeak { level: usize, amplitude: f64 },
    #[error("fluxonium basis of size {size} is too small: level {level} shifts by {shift:e} when doubled")]
    BasisTooSmall { size: usize, level: usize, shift: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
