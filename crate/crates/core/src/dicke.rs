//! Collective N-dipole (Dicke) Hamiltonians in the symmetric spin-`N/2` sector.

use crate::error::{invalid, Result};
use crate::linalg::{conjugate, kron, unitary_exp, OperatorMatrix, OperatorSum};
use crate::qops::{fock_ops, spin_ops, FockOps, FockSpace, SpinOps, SpinSpace};
use crate::rabi::{cos_sin_of, RabiParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeParams {
    pub base: RabiParams,
    pub n_dipoles: usize,
}

impl DickeParams {
    pub fn new(base: RabiParams, n_dipoles: usize) -> Result<Self> {
        let p = Self { base, n_dipoles };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.n_dipoles < 1 {
            return Err(invalid("n_dipoles", "at least one dipole is required"));
        }
        Ok(())
    }

    pub fn j(&self) -> f64 {
        self.n_dipoles as f64 / 2.0
    }

    pub fn spin_dim(&self) -> usize {
        self.n_dipoles + 1
    }

    pub fn dim(&self) -> usize {
        self.spin_dim() * self.base.field_dim()
    }
}

/// Assembly route for the corrected Coulomb-gauge Dicke Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DickeMethod {
    /// `U_N (ω_10 Jz) U_N† + ω_c a†a`, `U_N = exp(2iη X Jx)`.
    Conjugation,
    /// `ω_10 [Jz cos(cηX) + Jy sin(cηX)] + ω_c a†a` with the given factor `c`.
    ClosedForm { factor: f64 },
}

struct Parts {
    spin: SpinOps,
    field: FockOps,
    x: OperatorMatrix,
}

impl Parts {
    fn new(p: &DickeParams) -> Result<Self> {
        p.validate()?;
        let field = fock_ops(FockSpace::new(p.base.cutoff)?);
        let x = field.position();
        Ok(Self {
            spin: spin_ops(SpinSpace::new(p.n_dipoles)?),
            field,
            x,
        })
    }

    fn number(&self) -> Result<OperatorMatrix> {
        kron(&OperatorMatrix::identity(self.spin.jz.dim()), &self.field.n_op)
    }

    fn field_only(&self, op: &OperatorMatrix) -> Result<OperatorMatrix> {
        kron(&OperatorMatrix::identity(self.spin.jz.dim()), op)
    }
}

/// Per-dipole TRK value `2 g_C²/ω_10`, scaled by `j`.
pub fn default_dicke_diamagnetic(p: &DickeParams) -> f64 {
    let g = p.base.g_c();
    p.j() * 2.0 * g * g / p.base.omega_10
}

/// `ω_c a†a + ω_10 Jz + 2 g_C X Jy + D X²`.
pub fn build_dicke_standard(p: &DickeParams, diamagnetic: Option<f64>) -> Result<OperatorMatrix> {
    let parts = Parts::new(p)?;
    let d = diamagnetic.unwrap_or_else(|| default_dicke_diamagnetic(p));
    let b = &p.base;
    let x2 = parts.field_only(&parts.x.matmul(&parts.x).hermitian_part())?;
    Ok(OperatorSum::new(p.dim())
        .add(b.omega_c, &parts.number()?)
        .add(
            b.omega_10,
            &kron(&parts.spin.jz, &OperatorMatrix::identity(b.field_dim()))?,
        )
        .add(2.0 * b.g_c(), &kron(&parts.spin.jy, &parts.x)?)
        .add(d, &x2)
        .finish())
}

/// `exp(2iη X Jx)`.
pub fn dicke_gauge_unitary(p: &DickeParams) -> Result<OperatorMatrix> {
    let parts = Parts::new(p)?;
    unitary_exp(&kron(&parts.spin.jx, &parts.x)?, 2.0 * p.base.eta)
}

pub fn build_dicke_correct(p: &DickeParams, method: DickeMethod) -> Result<OperatorMatrix> {
    let parts = Parts::new(p)?;
    let b = &p.base;
    let sum = OperatorSum::new(p.dim()).add(b.omega_c, &parts.number()?);
    match method {
        DickeMethod::Conjugation => {
            let h0 = kron(&parts.spin.jz, &OperatorMatrix::identity(b.field_dim()))?.scale_real(b.omega_10);
            let rotated = conjugate(&dicke_gauge_unitary(p)?, &h0)?;
            Ok(OperatorSum::new(p.dim())
                .add(1.0, &rotated)
                .add(b.omega_c, &parts.number()?)
                .finish())
        }
        DickeMethod::ClosedForm { factor } => {
            if !factor.is_finite() {
                return Err(invalid("factor", "must be finite"));
            }
            let (c, s) = cos_sin_of(&parts.x, factor * b.eta)?;
            Ok(sum
                .add(b.omega_10, &kron(&parts.spin.jz, &c)?)
                .add(b.omega_10, &kron(&parts.spin.jy, &s)?)
                .finish())
        }
    }
}

/// Dipole-gauge Dicke Hamiltonian, the image of the corrected Coulomb form
/// under `U_N†`: `ω_c a†a + ω_10 Jz + 2i g_D (a† − a) Jx + 4 (g_D²/ω_c) Jx²`.
pub fn build_dicke_dipole(p: &DickeParams) -> Result<OperatorMatrix> {
    let parts = Parts::new(p)?;
    let b = &p.base;
    let jx2 = parts.spin.jx.matmul(&parts.spin.jx).hermitian_part();
    let g = b.g_d();
    Ok(OperatorSum::new(p.dim())
        .add(b.omega_c, &parts.number()?)
        .add(
            b.omega_10,
            &kron(&parts.spin.jz, &OperatorMatrix::identity(b.field_dim()))?,
        )
        .add(2.0 * g, &kron(&parts.spin.jx, &parts.field.momentum())?)
        .add(
            4.0 * g * g / b.omega_c,
            &kron(&jx2, &OperatorMatrix::identity(b.field_dim()))?,
        )
        .finish())
}

/// Entrywise agreement of each closed-form factor with the conjugation result.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorReport {
    /// `(factor, ‖closed_form(factor) − conjugation‖_max)` per candidate.
    pub deviations: alloc::vec::Vec<(f64, f64)>,
    /// Candidate with the smallest deviation.
    pub best_factor: f64,
}

pub fn closed_form_factor_report(p: &DickeParams, candidates: &[f64]) -> Result<FactorReport> {
    if candidates.is_empty() {
        return Err(invalid("candidates", "need at least one factor"));
    }
    let reference = build_dicke_correct(p, DickeMethod::Conjugation)?;
    let mut deviations = alloc::vec::Vec::with_capacity(candidates.len());
    for &factor in candidates {
        let h = build_dicke_correct(p, DickeMethod::ClosedForm { factor })?;
        deviations.push((factor, h.max_abs_diff(&reference)));
    }
    let best_factor = deviations
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|d| d.0)
        .expect("non-empty");
    Ok(FactorReport {
        deviations,
        best_factor,
    })
}
