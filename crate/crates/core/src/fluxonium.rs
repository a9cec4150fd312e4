//! Fluxonium qubit capacitively coupled to an LC oscillator (charge gauge).
//!
//! The bare fluxonium `4Ẽ_C N̂² + (Ẽ_L/2)φ̂² − E_J cos φ̂` is diagonalized in
//! the oscillator basis of its quadratic part, where `φ̂ = φ_zpf (b + b†)` with
//! `φ_zpf = (2Ẽ_C/Ẽ_L)^{1/4}` and frequency `√(8Ẽ_C Ẽ_L)`. Its two lowest
//! levels then feed the two-level charge-gauge models.
//!
//! The reduced charge of the LC oscillator is `χ̂ = −iχ₀(a − a†)`. This is a
//! different object from the gauge function of the particle models.
//!
//! Sign conventions follow [`crate::qops`]: `σ_y = [[0, i], [−i, 0]]` in the
//! (ground, excited) basis. With this σ_y the corrected closed form reads
//! `σ_z cosh[2κ(a − a†)] − i σ_y sinh[2κ(a − a†)]`, where `κ = g_C/ω_10`.

use crate::error::{invalid, Error, Result};
use crate::linalg::{conjugate, hermitian_eig, kron, matrix_function, unitary_exp, OperatorMatrix, OperatorSum, C64};
use crate::math;
use crate::qops::{fock_ops, pauli, FockSpace};
use crate::rabi::cos_sin_of;
use alloc::vec::Vec;

/// Smallest accepted oscillator-basis dimension for the fluxonium solver.
pub const MIN_BASIS_SIZE: usize = 40;
/// Number of fluxonium levels kept in a [`FluxoniumBasis`].
pub const FLUX_LEVELS: usize = 8;
/// Largest level shift tolerated when the basis is doubled.
pub const BASIS_CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxoniumParams {
    pub e_c: f64,
    pub e_l: f64,
    pub e_j: f64,
    pub basis_size: usize,
    pub omega_c: f64,
    /// Reduced-charge zero-point amplitude of the LC oscillator.
    pub chi0: f64,
    pub cutoff: usize,
}

impl FluxoniumParams {
    pub fn new(
        e_c: f64,
        e_l: f64,
        e_j: f64,
        basis_size: usize,
        omega_c: f64,
        chi0: f64,
        cutoff: usize,
    ) -> Result<Self> {
        let p = Self {
            e_c,
            e_l,
            e_j,
            basis_size,
            omega_c,
            chi0,
            cutoff,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("e_c", self.e_c), ("e_l", self.e_l), ("omega_c", self.omega_c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, "must be finite and positive"));
            }
        }
        for (name, v) in [("e_j", self.e_j), ("chi0", self.chi0)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, "must be finite and non-negative"));
            }
        }
        if self.basis_size < MIN_BASIS_SIZE {
            return Err(invalid("basis_size", "fluxonium basis needs at least 40 states"));
        }
        if self.cutoff < 1 {
            return Err(invalid("cutoff", "Fock cutoff must be at least 1"));
        }
        Ok(())
    }

    /// Frequency of the quadratic part, `√(8Ẽ_C Ẽ_L)`.
    pub fn plasma_frequency(&self) -> f64 {
        math::sqrt(8.0 * self.e_c * self.e_l)
    }

    pub fn phi_zpf(&self) -> f64 {
        math::sqrt_sqrt(2.0 * self.e_c / self.e_l)
    }

    pub fn with_chi0(self, chi0: f64) -> Self {
        Self { chi0, ..self }
    }

    pub fn with_cutoff(self, cutoff: usize) -> Self {
        Self { cutoff, ..self }
    }

    pub fn field_dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.field_dim()
    }
}

/// Lowest fluxonium levels and their flux and charge matrix elements.
///
/// Eigenvectors are real. Level 1 is oriented so that `φ_10 > 0`, and every
/// other level has its largest component positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxoniumBasis {
    pub energies: Vec<f64>,
    pub phi_elems: OperatorMatrix,
    pub n_elems: OperatorMatrix,
}

impl FluxoniumBasis {
    pub fn omega_10(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    pub fn phi_10(&self) -> f64 {
        self.phi_elems.get(1, 0).re
    }

    /// Two-level coupling `g_C = ω_10 φ_10 χ₀`.
    pub fn g_c(&self, chi0: f64) -> f64 {
        self.omega_10() * self.phi_10() * chi0
    }
}

fn solve_in_basis(p: &FluxoniumParams, size: usize) -> Result<FluxoniumBasis> {
    let ops = fock_ops(FockSpace::new(size - 1)?);
    let zpf = p.phi_zpf();
    let phi = ops.position().scale_real(zpf);
    let charge = ops.momentum().scale_real(0.5 / zpf);
    let omega = p.plasma_frequency();
    let diag: Vec<f64> = (0..size).map(|k| omega * (k as f64 + 0.5)).collect();
    let mut h = OperatorMatrix::from_diag(&diag);
    if p.e_j != 0.0 {
        h.add_scaled(C64::new(-p.e_j, 0.0), &matrix_function(&phi, math::cos)?);
    }
    let spec = hermitian_eig(&h.hermitian_part())?;
    let levels = FLUX_LEVELS.min(size);
    let mut vecs: Vec<Vec<C64>> = (0..levels)
        .map(|k| spec.eigenvector(k).expect("vectors requested"))
        .collect();
    let elem = |op: &OperatorMatrix, vecs: &[Vec<C64>], i: usize, j: usize| -> C64 {
        let w = op.mul_vec(&vecs[j]);
        vecs[i].iter().zip(&w).map(|(u, x)| u.conj() * x).sum()
    };
    if elem(&phi, &vecs, 1, 0).re < 0.0 {
        for z in vecs[1].iter_mut() {
            *z = -*z;
        }
    }
    let phi_elems = OperatorMatrix::from_fn(levels, |i, j| elem(&phi, &vecs, i, j));
    let n_elems = OperatorMatrix::from_fn(levels, |i, j| elem(&charge, &vecs, i, j));
    Ok(FluxoniumBasis {
        energies: spec.eigenvalues()[..levels].to_vec(),
        phi_elems,
        n_elems,
    })
}

/// Diagonalizes the zero-flux fluxonium and checks that doubling the basis
/// moves none of the kept levels by more than [`BASIS_CONVERGENCE_TOL`].
pub fn solve_fluxonium(p: &FluxoniumParams) -> Result<FluxoniumBasis> {
    p.validate()?;
    let basis = solve_in_basis(p, p.basis_size)?;
    let doubled = solve_in_basis(p, 2 * p.basis_size)?;
    for (level, (a, b)) in basis.energies.iter().zip(&doubled.energies).enumerate() {
        let shift = (a - b).abs();
        if shift > BASIS_CONVERGENCE_TOL {
            return Err(Error::BasisTooSmall {
                size: p.basis_size,
                level,
                shift,
            });
        }
    }
    Ok(basis)
}

struct Oscillator {
    n_op: OperatorMatrix,
    /// `a − a†`, anti-Hermitian.
    a_minus: OperatorMatrix,
}

impl Oscillator {
    fn new(cutoff: usize) -> Result<Self> {
        let ops = fock_ops(FockSpace::new(cutoff)?);
        let mut a_minus = ops.a.clone();
        a_minus.add_scaled(C64::new(-1.0, 0.0), &ops.a_dag);
        Ok(Self {
            n_op: ops.n_op,
            a_minus,
        })
    }
}

/// `ω_10/2 σ_z`, `a†a` and the oscillator operators on the composite space.
fn two_level_bare(p: &FluxoniumParams, basis: &FluxoniumBasis) -> Result<(OperatorMatrix, OperatorMatrix, Oscillator)> {
    let sz = kron(
        &pauli().z.scale_real(basis.omega_10() / 2.0),
        &OperatorMatrix::identity(p.field_dim()),
    )?;
    let osc = Oscillator::new(p.cutoff)?;
    let n = kron(&OperatorMatrix::identity(2), &osc.n_op)?;
    Ok((sz, n, osc))
}

/// Two-level projection of the minimally coupled charge-gauge Hamiltonian:
/// `ω_10/2 σ_z + ω_c a†a + i g_C σ_y (a − a†) − 4Ẽ_C χ₀² (a − a†)²`.
pub fn build_flux_charge_standard(p: &FluxoniumParams, basis: &FluxoniumBasis) -> Result<OperatorMatrix> {
    p.validate()?;
    let (sz, n, osc) = two_level_bare(p, basis)?;
    let g = basis.g_c(p.chi0);
    let coupling = kron(&pauli().y, &osc.a_minus)?;
    let a2 = kron(&OperatorMatrix::identity(2), &osc.a_minus.matmul(&osc.a_minus))?;
    Ok(OperatorSum::new(p.dim())
        .add(1.0, &sz)
        .add(p.omega_c, &n)
        .add_complex(C64::new(0.0, g), &coupling)
        .add(-4.0 * p.e_c * p.chi0 * p.chi0, &a2)
        .finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxMethod {
    Conjugation,
    ClosedForm,
}

/// `ℛ = exp[κ σ_x (a − a†)]` with `κ = g_C/ω_10`.
pub fn flux_gauge_unitary(p: &FluxoniumParams, basis: &FluxoniumBasis) -> Result<OperatorMatrix> {
    p.validate()?;
    let osc = Oscillator::new(p.cutoff)?;
    let kappa = basis.g_c(p.chi0) / basis.omega_10();
    // exp(κK) with K anti-Hermitian equals exp(iκ(−iK)).
    let anti = kron(&pauli().x, &osc.a_minus)?;
    unitary_exp(&anti.scale(C64::new(0.0, -1.0)).hermitian_part(), kappa)
}

/// Gauge-invariant two-level charge-gauge Hamiltonian `ω_c a†a + ℛ (ω_10/2 σ_z) ℛ†`.
pub fn build_flux_charge_correct(
    p: &FluxoniumParams,
    basis: &FluxoniumBasis,
    method: FluxMethod,
) -> Result<OperatorMatrix> {
    p.validate()?;
    let (sz, n, osc) = two_level_bare(p, basis)?;
    let rotated = match method {
        FluxMethod::Conjugation => conjugate(&flux_gauge_unitary(p, basis)?, &sz)?,
        FluxMethod::ClosedForm => {
            let kappa = basis.g_c(p.chi0) / basis.omega_10();
            // B = i(a − a†): cosh[2κ(a − a†)] = cos 2κB and −i sinh[2κ(a − a†)] = −sin 2κB.
            let b = osc.a_minus.scale(C64::new(0.0, 1.0)).hermitian_part();
            let (cos_b, sin_b) = cos_sin_of(&b, 2.0 * kappa)?;
            let half = basis.omega_10() / 2.0;
            OperatorSum::new(p.dim())
                .add(half, &kron(&pauli().z, &cos_b)?)
                .add(-half, &kron(&pauli().y, &sin_b)?)
                .finish()
        }
    };
    Ok(OperatorSum::new(p.dim()).add(1.0, &rotated).add(p.omega_c, &n).finish())
}
