//! Truncated cavity-QED Hamiltonians and the dense linear algebra needed to
//! compare them across gauges.
//!
//! Every builder returns an [`OperatorMatrix`] on the composite space
//! `matter ⊗ field` (matter index varies slowest). Energies are expressed in
//! units of the cavity frequency unless a module says otherwise.
//!
//! The crate is `no_std` and only needs `alloc`; IO, sweeps and the command
//! line live in the companion `cqed` crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod dicke;
mod error;
pub mod fluxonium;
pub mod linalg;
pub(crate) mod math;
pub mod particle1d;
pub mod qops;
pub mod rabi;

pub use error::{Error, Result};
pub use linalg::{OperatorMatrix, Spectrum, C64};
