//! Two-level (Rabi) gauge family on `qubit ⊗ Fock(cutoff)`.
//!
//! All builders use `ℏ = 1`; `η = g_D/ω_c` and `g_C = g_D ω_10/ω_c`.
//! Couplings enter through the quadratures `X = a + a†` and `P = i(a† − a)`.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::linalg::{hermitian_eig, kron, reconstruct, unitary_exp, OperatorMatrix, OperatorSum, Spectrum, C64};
use crate::math;
use crate::qops::{fock_ops, pauli, FockOps, FockSpace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    pub omega_c: f64,
    pub omega_10: f64,
    pub eta: f64,
    pub cutoff: usize,
}

impl RabiParams {
    pub fn new(omega_c: f64, omega_10: f64, eta: f64, cutoff: usize) -> Result<Self> {
        let p = Self {
            omega_c,
            omega_10,
            eta,
            cutoff,
        };
        p.validate()?;
        Ok(p)
    }

    /// `ω_c = 1`, `ω_10 = 1 + detuning`.
    pub fn with_detuning(detuning: f64, eta: f64, cutoff: usize) -> Result<Self> {
        Self::new(1.0, 1.0 + detuning, eta, cutoff)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c.is_finite() && self.omega_c > 0.0) {
            return Err(invalid("omega_c", "must be finite and > 0"));
        }
        if !(self.omega_10.is_finite() && self.omega_10 > 0.0) {
            return Err(invalid("omega_10", "must be finite and > 0"));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(invalid("eta", "must be finite and >= 0"));
        }
        if self.cutoff < 1 {
            return Err(invalid("cutoff", "Fock cutoff must be at least 1"));
        }
        Ok(())
    }

    pub fn g_d(&self) -> f64 {
        self.eta * self.omega_c
    }

    pub fn g_c(&self) -> f64 {
        self.g_d() * self.omega_10 / self.omega_c
    }

    pub fn detuning(&self) -> f64 {
        self.omega_10 - self.omega_c
    }

    pub fn with_cutoff(self, cutoff: usize) -> Self {
        Self { cutoff, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn field_dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.field_dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeParam {
    alpha: f64,
}

impl GaugeParam {
    pub const DIPOLE: Self = Self { alpha: 0.0 };
    pub const COULOMB: Self = Self { alpha: 1.0 };

    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid("alpha", "must lie in [0, 1]"));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// How the corrected Coulomb-gauge Hamiltonian is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectMethod {
    /// `U (ω_10/2 σz) U† + ω_c a†a` with `U = exp(iη σx X)`.
    Conjugation,
    /// `σz cos(2ηX) + σy sin(2ηX)` via matrix functions of `X`.
    ClosedForm,
}

/// Evaluation route for truncated Maclaurin polynomials of operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaylorEval {
    /// Scalar polynomial applied to the eigenvalues of `X`, with the tail
    /// subtracted from `cos`/`sin` when the series is still converging.
    Spectral,
    /// Horner recurrence on the operator itself.
    Horner,
}

struct Field {
    ops: FockOps,
    x: OperatorMatrix,
}

impl Field {
    fn new(cutoff: usize) -> Result<Self> {
        let ops = fock_ops(FockSpace::new(cutoff)?);
        let x = ops.position();
        Ok(Self { ops, x })
    }

    fn dim(&self) -> usize {
        self.x.dim()
    }
}

fn on_matter(op: &OperatorMatrix, field_dim: usize) -> Result<OperatorMatrix> {
    kron(op, &OperatorMatrix::identity(field_dim))
}

fn on_field(op: &OperatorMatrix) -> Result<OperatorMatrix> {
    kron(&OperatorMatrix::identity(2), op)
}

/// `(cos(cX), sin(cX))` from a single diagonalization of `X`.
/// A vanishing angle gives the exact identity and zero.
pub(crate) fn cos_sin_of(x: &OperatorMatrix, c: f64) -> Result<(OperatorMatrix, OperatorMatrix)> {
    scalar_pair_of(x, |t| (math::cos(c * t), math::sin(c * t)), c == 0.0)
}

fn scalar_pair_of(
    x: &OperatorMatrix,
    f: impl Fn(f64) -> (f64, f64),
    trivial: bool,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let n = x.dim();
    if trivial {
        return Ok((OperatorMatrix::identity(n), OperatorMatrix::zeros(n)));
    }
    let spec = hermitian_eig(x)?;
    let (cv, sv): (Vec<C64>, Vec<C64>) = spec
        .eigenvalues()
        .iter()
        .map(|&t| {
            let (c, s) = f(t);
            (C64::new(c, 0.0), C64::new(s, 0.0))
        })
        .unzip();
    Ok((
        reconstruct(&spec, &cv)?.hermitian_part(),
        reconstruct(&spec, &sv)?.hermitian_part(),
    ))
}

/// Order-`n` Maclaurin polynomials of `cos θ` and `sin θ` (degree ≤ n).
///
/// Inside the radius where the omitted terms decrease monotonically the
/// polynomial is formed as `cos θ − tail`, which avoids the catastrophic
/// cancellation of direct summation at large `|θ|`.
pub fn maclaurin_cos_sin(theta: f64, order: usize) -> (f64, f64) {
    let t = math::abs(theta);
    if t == 0.0 {
        return (1.0, 0.0);
    }
    if t < (order + 1) as f64 {
        let mut k = order + 1;
        let mut mag = math::exp(k as f64 * math::ln(t) - math::ln_factorial(k));
        let (mut tail_c, mut tail_s) = (0.0, 0.0);
        loop {
            let signed = if theta < 0.0 && k % 2 == 1 { -mag } else { mag };
            if k % 2 == 0 {
                tail_c += if (k / 2) % 2 == 0 { signed } else { -signed };
            } else {
                tail_s += if ((k - 1) / 2) % 2 == 0 { signed } else { -signed };
            }
            k += 1;
            mag *= t / k as f64;
            if mag < 1e-18 * math::abs(tail_c).max(math::abs(tail_s)).max(1.0) {
                break;
            }
        }
        (math::cos(theta) - tail_c, math::sin(theta) - tail_s)
    } else {
        let (mut c, mut s) = (0.0, 0.0);
        let mut term = 1.0;
        for k in 0..=order {
            if k > 0 {
                term *= theta / k as f64;
            }
            match k % 4 {
                0 => c += term,
                1 => s += term,
                2 => c -= term,
                _ => s -= term,
            }
        }
        (c, s)
    }
}

/// `ω_c a†a + ω_10/2 σz + i g_D (a† − a) σx`.
pub fn build_h_d(p: &RabiParams) -> Result<OperatorMatrix> {
    p.validate()?;
    let f = Field::new(p.cutoff)?;
    let s = pauli();
    let n = on_field(&f.ops.n_op)?;
    let sz = on_matter(&s.z, f.dim())?;
    let coupling = kron(&s.x, &f.ops.momentum())?;
    Ok(OperatorSum::new(p.dim())
        .add(p.omega_c, &n)
        .add(p.omega_10 / 2.0, &sz)
        .add(p.g_d(), &coupling)
        .finish())
}

/// `g_C²/ω_10`, the two-level diamagnetic coefficient saturating the TRK sum.
pub fn default_diamagnetic(p: &RabiParams) -> f64 {
    let g = p.g_c();
    g * g / p.omega_10
}

/// `ω_c a†a + ω_10/2 σz + g_C σy X + D X²`; `D` defaults to [`default_diamagnetic`].
pub fn build_h_c_standard(p: &RabiParams, diamagnetic: Option<f64>) -> Result<OperatorMatrix> {
    p.validate()?;
    let d = diamagnetic.unwrap_or_else(|| default_diamagnetic(p));
    if !d.is_finite() {
        return Err(invalid("diamagnetic", "must be finite"));
    }
    let f = Field::new(p.cutoff)?;
    let s = pauli();
    let n = on_field(&f.ops.n_op)?;
    let sz = on_matter(&s.z, f.dim())?;
    let coupling = kron(&s.y, &f.x)?;
    let x2 = on_field(&f.x.matmul(&f.x).hermitian_part())?;
    Ok(OperatorSum::new(p.dim())
        .add(p.omega_c, &n)
        .add(p.omega_10 / 2.0, &sz)
        .add(p.g_c(), &coupling)
        .add(d, &x2)
        .finish())
}

/// `exp(iη σx X)` on the composite space.
pub fn gauge_unitary(p: &RabiParams) -> Result<OperatorMatrix> {
    p.validate()?;
    let f = Field::new(p.cutoff)?;
    let generator = kron(&pauli().x, &f.x)?;
    unitary_exp(&generator, p.eta)
}

/// Corrected Coulomb-gauge Hamiltonian `ω_c a†a + ω_10/2 [σz cos 2ηX + σy sin 2ηX]`.
pub fn build_h_c_correct(p: &RabiParams, method: CorrectMethod) -> Result<OperatorMatrix> {
    match method {
        CorrectMethod::ClosedForm => build_h_alpha(p, GaugeParam::COULOMB),
        CorrectMethod::Conjugation => {
            p.validate()?;
            let f = Field::new(p.cutoff)?;
            let u = gauge_unitary(p)?;
            let h0 = on_matter(&pauli().z.scale_real(p.omega_10 / 2.0), f.dim())?;
            let rotated = crate::linalg::conjugate(&u, &h0)?;
            let n = on_field(&f.ops.n_op)?;
            Ok(OperatorSum::new(p.dim()).add(1.0, &rotated).add(p.omega_c, &n).finish())
        }
    }
}

/// Corrected Coulomb-gauge Hamiltonian with `cos`/`sin` of `2ηX` replaced by
/// their order-`n` Maclaurin polynomials.
pub fn build_h_c_taylor(p: &RabiParams, order: usize) -> Result<OperatorMatrix> {
    build_h_c_taylor_with(p, order, TaylorEval::Spectral)
}

pub fn build_h_c_taylor_with(p: &RabiParams, order: usize, eval: TaylorEval) -> Result<OperatorMatrix> {
    p.validate()?;
    if order < 1 {
        return Err(invalid("order", "Taylor order must be at least 1"));
    }
    let f = Field::new(p.cutoff)?;
    let c = 2.0 * p.eta;
    let (cos_x, sin_x) = match eval {
        TaylorEval::Spectral => scalar_pair_of(&f.x, |t| maclaurin_cos_sin(c * t, order), c == 0.0)?,
        TaylorEval::Horner => horner_cos_sin(&f.x.scale_real(c), order),
    };
    assemble_coulomb_like(p, &f, &cos_x, &sin_x, 0.0)
}

/// Both polynomials by Horner recurrence on `θ`, split by parity of the power.
fn horner_cos_sin(theta: &OperatorMatrix, order: usize) -> (OperatorMatrix, OperatorMatrix) {
    let n = theta.dim();
    // Coefficients of θ^k: cos gets (−1)^{k/2}/k! for even k, sin (−1)^{(k−1)/2}/k! for odd k.
    let coeff = |k: usize| {
        let inv_fact = math::exp(-math::ln_factorial(k));
        if k % 4 < 2 {
            inv_fact
        } else {
            -inv_fact
        }
    };
    let mut c = OperatorMatrix::zeros(n);
    let mut s = OperatorMatrix::zeros(n);
    for k in (0..=order).rev() {
        c = c.matmul(theta);
        s = s.matmul(theta);
        let target = if k % 2 == 0 { &mut c } else { &mut s };
        target.add_scaled(C64::new(coeff(k), 0.0), &OperatorMatrix::identity(n));
    }
    (c.hermitian_part(), s.hermitian_part())
}

fn assemble_coulomb_like(
    p: &RabiParams,
    f: &Field,
    cos_x: &OperatorMatrix,
    sin_x: &OperatorMatrix,
    dipole_weight: f64,
) -> Result<OperatorMatrix> {
    let s = pauli();
    let n = on_field(&f.ops.n_op)?;
    let mut sum = OperatorSum::new(p.dim()).add(p.omega_c, &n);
    if dipole_weight != 0.0 {
        let coupling = kron(&s.x, &f.ops.momentum())?;
        sum = sum.add(dipole_weight * p.g_d(), &coupling);
    }
    let zc = kron(&s.z, cos_x)?;
    let ys = kron(&s.y, sin_x)?;
    Ok(sum.add(p.omega_10 / 2.0, &zc).add(p.omega_10 / 2.0, &ys).finish())
}

/// Gauge family interpolating dipole (`α = 0`) and corrected Coulomb (`α = 1`):
/// `ω_c a†a + i(1−α) g_D (a† − a) σx + ω_10/2 [σz cos 2αηX + σy sin 2αηX]`.
pub fn build_h_alpha(p: &RabiParams, g: GaugeParam) -> Result<OperatorMatrix> {
    p.validate()?;
    let f = Field::new(p.cutoff)?;
    let (cos_x, sin_x) = cos_sin_of(&f.x, 2.0 * g.alpha() * p.eta)?;
    assemble_coulomb_like(p, &f, &cos_x, &sin_x, 1.0 - g.alpha())
}

/// Sorted spectrum of a Rabi-family Hamiltonian tagged with model id and cutoff.
pub fn spectrum_of(h: &OperatorMatrix, model_id: &str, cutoff: usize) -> Result<Spectrum> {
    Ok(crate::linalg::hermitian_eig(h)?.with_metadata(model_id, cutoff))
}

/// Constant `g_D²/ω_c` dropped from the dipole Hamiltonian; it is restored
/// before the matrix comparison in [`check_gauge_theorem`].
pub fn dropped_constant(p: &RabiParams) -> f64 {
    let g = p.g_d();
    g * g / p.omega_c
}

/// Default share of Fock levels treated as interior in the gauge check.
pub const INTERIOR_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTheoremReport {
    pub cutoff: usize,
    /// Fock levels `0..interior_levels` form the interior block.
    pub interior_levels: usize,
    /// `‖U (H_D + C) U† − H_C‖_max` over the whole matrix.
    pub full_deviation: f64,
    /// Same, restricted to rows and columns inside the interior block.
    pub interior_deviation: f64,
    /// Largest deviation in entries touching the top Fock levels.
    pub boundary_deviation: f64,
    /// `full_deviation / ‖H_C‖_max`.
    pub relative_full_deviation: f64,
}

impl GaugeTheoremReport {
    pub fn passes(&self, omega_c: f64) -> bool {
        self.interior_deviation <= 1e-8 * omega_c
    }
}

pub fn check_gauge_theorem(p: &RabiParams) -> Result<GaugeTheoremReport> {
    check_gauge_theorem_with(p, INTERIOR_FRACTION)
}

/// Compares `U (H_D + C) U†` with the closed-form corrected Hamiltonian.
pub fn check_gauge_theorem_with(p: &RabiParams, interior_fraction: f64) -> Result<GaugeTheoremReport> {
    p.validate()?;
    if !(interior_fraction > 0.0 && interior_fraction <= 1.0) {
        return Err(invalid("interior_fraction", "must lie in (0, 1]"));
    }
    let dim = p.dim();
    let nf = p.field_dim();
    let mut h_d = build_h_d(p)?;
    h_d.add_scaled(C64::new(dropped_constant(p), 0.0), &OperatorMatrix::identity(dim));
    let transformed = crate::linalg::conjugate(&gauge_unitary(p)?, &h_d)?;
    let h_c = build_h_c_correct(p, CorrectMethod::ClosedForm)?;

    let interior_levels = ((interior_fraction * nf as f64) as usize).clamp(1, nf);
    let (mut full, mut interior, mut boundary) = (0.0f64, 0.0f64, 0.0f64);
    for r in 0..dim {
        for c in 0..dim {
            let d = (transformed.get(r, c) - h_c.get(r, c)).norm();
            full = full.max(d);
            if r % nf < interior_levels && c % nf < interior_levels {
                interior = interior.max(d);
            } else {
                boundary = boundary.max(d);
            }
        }
    }
    Ok(GaugeTheoremReport {
        cutoff: p.cutoff,
        interior_levels,
        full_deviation: full,
        interior_deviation: interior,
        boundary_deviation: boundary,
        relative_full_deviation: full / h_c.max_abs().max(f64::MIN_POSITIVE),
    })
}
