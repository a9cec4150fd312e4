//! One-dimensional effective particle on a uniform grid (`ℏ = 1`).
//!
//! The kinetic term uses the five-point fourth-order stencil
//! `(−1, 16, −30, 16, −1)/(12h²)` and the momentum `p = −i D₁` the
//! antisymmetric stencil `(1, −8, 0, 8, −1)/(12h)`. Wavefunctions vanish
//! outside the grid. Level `k` is returned with its rightmost significant
//! lobe positive, so `x₁₀ > 0` for symmetric wells.
//!
//! Besides the eigenbasis this module builds the truncation-induced
//! nonlocal potential kernel, checks the phase form of minimal coupling on
//! the grid, and assembles the untruncated-matter light–matter models in
//! both gauges.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::{kron, lowest_eigenpairs, BandedHermitian, OperatorMatrix, OperatorSum, C64};
use crate::math;
use crate::qops::{fock_ops, FockSpace};

pub const MIN_GRID_POINTS: usize = 201;
/// Largest continuum-normalised amplitude tolerated at the grid edges.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Largest Richardson-estimated eigenvalue error tolerated (relative to `max(1, |E|)`).
pub const REFINEMENT_TOL: f64 = 1e-6;
/// Levels inspected by the grid-refinement check.
pub const REFINEMENT_LEVELS: usize = 6;
/// Off-diagonality width `w` in [`nonlocal_kernel`].
pub const KERNEL_WIDTH: f64 = 0.5;
/// Low-lying levels used for the projected residual and spectral checks.
pub const IDENTITY_LEVELS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        let g = Self { x_min, x_max, n_points };
        g.validate()?;
        Ok(g)
    }

    /// `[−half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < MIN_GRID_POINTS {
            return Err(invalid("n_points", alloc::format!("need at least {MIN_GRID_POINTS}")));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min) {
            return Err(invalid("grid", "need finite x_min < x_max"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Same interval with about half the points (`h` doubled exactly for odd counts).
    fn coarsened(&self) -> Self {
        let n = if self.n_points % 2 == 1 {
            (self.n_points + 1) / 2
        } else {
            self.n_points / 2
        };
        Self { n_points: n, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `m ω₀² x²/2`.
    Harmonic { omega0: f64 },
    /// `−μx² + λx⁴`.
    DoubleWell { mu: f64, lambda: f64 },
    /// Samples `(x, V)` with strictly increasing `x`, linearly interpolated.
    Tabulated { x: Vec<f64>, v: Vec<f64> },
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::Harmonic { omega0 } => {
                if !(omega0.is_finite() && *omega0 > 0.0) {
                    return Err(invalid("omega0", "must be finite and > 0"));
                }
            }
            Potential::DoubleWell { mu, lambda } => {
                if !(mu.is_finite() && lambda.is_finite() && *lambda > 0.0) {
                    return Err(invalid("lambda", "need finite mu and lambda > 0"));
                }
            }
            Potential::Tabulated { x, v } => {
                if x.len() < 2 || x.len() != v.len() {
                    return Err(invalid("tabulated", "need at least two (x, V) pairs"));
                }
                if !x.windows(2).all(|w| w[1] > w[0]) {
                    return Err(invalid("tabulated", "x samples must be strictly increasing"));
                }
                if !x.iter().chain(v.iter()).all(|z| z.is_finite()) {
                    return Err(invalid("tabulated", "samples must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64, mass: f64) -> Result<f64> {
        Ok(match self {
            Potential::Harmonic { omega0 } => 0.5 * mass * omega0 * omega0 * x * x,
            Potential::DoubleWell { mu, lambda } => -mu * x * x + lambda * x * x * x * x,
            Potential::Tabulated { x: xs, v } => {
                let last = xs.len() - 1;
                if x < xs[0] || x > xs[last] {
                    return Err(invalid("tabulated", "grid extends beyond the tabulated range"));
                }
                let k = xs.partition_point(|&t| t <= x).clamp(1, last);
                let (x0, x1) = (xs[k - 1], xs[k]);
                let t = (x - x0) / (x1 - x0);
                v[k - 1] + t * (v[k] - v[k - 1])
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleModel {
    pub grid: Grid,
    pub potential: Potential,
    pub mass: f64,
    pub charge: f64,
    /// Number of retained levels `M`.
    pub eigen_count: usize,
}

impl ParticleModel {
    pub fn new(grid: Grid, potential: Potential, mass: f64, charge: f64, eigen_count: usize) -> Result<Self> {
        let m = Self {
            grid,
            potential,
            mass,
            charge,
            eigen_count,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.potential.validate()?;
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(invalid("mass", "must be finite and > 0"));
        }
        if !self.charge.is_finite() {
            return Err(invalid("charge", "must be finite"));
        }
        if self.eigen_count < 2 || self.eigen_count >= self.grid.n_points / 4 {
            return Err(invalid("eigen_count", "need 2 <= M < n_points/4"));
        }
        Ok(())
    }

    /// `ω₀ = 1`, `m = q = 1`, 32 levels on `[−12, 12]` with 1201 points.
    pub fn harmonic_preset() -> Self {
        Self::new(
            Grid::symmetric(12.0, 1201).expect("preset grid"),
            Potential::Harmonic { omega0: 1.0 },
            1.0,
            1.0,
            32,
        )
        .expect("preset model")
    }

    /// `V = −2.5x² + 0.5x⁴`, `m = q = 1`, 50 levels on `[−6, 6]` with 801 points.
    /// `ω₂₁/ω₁₀ ≈ 24`.
    pub fn double_well_preset() -> Self {
        Self::new(
            Grid::symmetric(6.0, 801).expect("preset grid"),
            Potential::DoubleWell { mu: 2.5, lambda: 0.5 },
            1.0,
            1.0,
            50,
        )
        .expect("preset model")
    }

    /// Harmonic model on the fine grid used for the minimal-coupling check.
    pub fn identity_preset() -> Self {
        Self::new(
            Grid::symmetric(10.0, 4801).expect("preset grid"),
            Potential::Harmonic { omega0: 1.0 },
            1.0,
            1.0,
            IDENTITY_LEVELS,
        )
        .expect("preset model")
    }

    pub fn with_grid(&self, grid: Grid) -> Self {
        Self { grid, ..self.clone() }
    }

    pub fn potential_samples(&self) -> Result<Vec<f64>> {
        (0..self.grid.n_points)
            .map(|i| self.potential.eval(self.grid.point(i), self.mass))
            .collect()
    }

    /// `p²/2m + V(x)` on the grid.
    pub fn hamiltonian(&self) -> Result<BandedHermitian> {
        let n = self.grid.n_points;
        let h = self.grid.spacing();
        let v = self.potential_samples()?;
        let k = 1.0 / (2.0 * self.mass * 12.0 * h * h);
        let mut out = BandedHermitian::zeros(n, 2);
        for i in 0..n {
            out.set(i, i, C64::new(30.0 * k + v[i], 0.0));
            if i >= 1 {
                out.set(i, i - 1, C64::new(-16.0 * k, 0.0));
            }
            if i >= 2 {
                out.set(i, i - 2, C64::new(k, 0.0));
            }
        }
        Ok(out)
    }

    /// `p = −i D₁` on the grid.
    pub fn momentum(&self) -> BandedHermitian {
        let n = self.grid.n_points;
        let c = 1.0 / (12.0 * self.grid.spacing());
        let mut out = BandedHermitian::zeros(n, 2);
        // D₁[i][i−1] = −8c, D₁[i][i−2] = c.
        for i in 0..n {
            if i >= 1 {
                out.set(i, i - 1, C64::new(0.0, 8.0 * c));
            }
            if i >= 2 {
                out.set(i, i - 2, C64::new(0.0, -c));
            }
        }
        out
    }
}

/// Retained particle levels and their matrix elements.
#[derive(Debug, Clone)]
pub struct MatterBasis {
    pub energies: Vec<f64>,
    /// `⟨i|x|j⟩`, real symmetric.
    pub x_elems: OperatorMatrix,
    /// `⟨i|p|j⟩`, imaginary antisymmetric.
    pub p_elems: OperatorMatrix,
    /// `⟨i|x²|j⟩` from the grid, not the square of the truncated `x`.
    pub x2_elems: OperatorMatrix,
    /// Continuum-normalised wavefunctions on the grid.
    pub wavefunctions: Vec<Vec<f64>>,
    pub grid: Grid,
}

impl MatterBasis {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `E_i − E_j`.
    pub fn omega(&self, i: usize, j: usize) -> f64 {
        self.energies[i] - self.energies[j]
    }

    pub fn omega_10(&self) -> f64 {
        self.omega(1, 0)
    }

    pub fn x10(&self) -> f64 {
        self.x_elems.get(1, 0).re
    }
}

/// Real, unit-ℓ² vector with the rightmost significant lobe positive.
fn realign(v: &[C64]) -> Vec<f64> {
    let pivot = v
        .iter()
        .copied()
        .fold(C64::new(0.0, 0.0), |a, b| if b.norm() > a.norm() { b } else { a });
    let phase = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut out: Vec<f64> = v.iter().map(|z| (z * phase).re).collect();
    let nrm = math::sqrt(out.iter().map(|x| x * x).sum());
    let peak = out.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if let Some(&edge) = out.iter().rev().find(|x| x.abs() > 1e-3 * peak) {
        let s = if edge < 0.0 { -1.0 } else { 1.0 };
        for x in out.iter_mut() {
            *x *= s / nrm;
        }
    }
    out
}

fn elements(vecs: &[Vec<f64>], f: impl Fn(usize, &[f64]) -> Vec<C64>) -> OperatorMatrix {
    let m = vecs.len();
    let applied: Vec<Vec<C64>> = (0..m).map(|j| f(j, &vecs[j])).collect();
    OperatorMatrix::from_fn(m, |i, j| {
        vecs[i].iter().zip(&applied[j]).map(|(a, b)| b * *a).sum::<C64>()
    })
    .hermitian_part()
}

fn refinement_shifts(model: &ParticleModel, fine: &[f64]) -> Result<Vec<f64>> {
    let coarse_grid = model.grid.coarsened();
    let levels = fine.len().min(REFINEMENT_LEVELS);
    let coarse = lowest_eigenpairs(&model.with_grid(coarse_grid).hamiltonian()?, levels)?;
    let ratio = coarse_grid.spacing() / model.grid.spacing();
    let denom = math::powi(ratio, 4) - 1.0;
    Ok((0..levels)
        .map(|k| math::abs(fine[k] - coarse.values[k]) / denom)
        .collect())
}

/// Lowest `M` eigenpairs and matrix elements, with grid-refinement and
/// boundary-decay checks.
pub fn solve_particle(model: &ParticleModel) -> Result<MatterBasis> {
    model.validate()?;
    let m = model.eigen_count;
    let h = model.grid.spacing();
    let eig = lowest_eigenpairs(&model.hamiltonian()?, m)?;

    let vecs: Vec<Vec<f64>> = eig.vectors.iter().map(|v| realign(v)).collect();
    let inv_sqrt_h = 1.0 / math::sqrt(h);
    let n = model.grid.n_points;
    for (level, v) in vecs.iter().enumerate() {
        let amplitude = [v[0], v[1], v[n - 2], v[n - 1]]
            .iter()
            .fold(0.0f64, |a, b| a.max(b.abs()))
            * inv_sqrt_h;
        if amplitude >= BOUNDARY_TOL {
            return Err(Error::BoundaryLeak { level, amplitude });
        }
    }

    for (level, shift) in refinement_shifts(model, &eig.values)?.into_iter().enumerate() {
        if shift > REFINEMENT_TOL * eig.values[level].abs().max(1.0) {
            return Err(Error::GridTooCoarse { level, shift });
        }
    }

    let xs = model.grid.points();
    let p_op = model.momentum();
    let x_elems = elements(&vecs, |_, v| {
        v.iter().zip(&xs).map(|(a, x)| C64::new(a * x, 0.0)).collect()
    });
    let x2_elems = elements(&vecs, |_, v| {
        v.iter().zip(&xs).map(|(a, x)| C64::new(a * x * x, 0.0)).collect()
    });
    let p_elems = elements(&vecs, |_, v| {
        let cv: Vec<C64> = v.iter().map(|&a| C64::new(a, 0.0)).collect();
        p_op.mul_vec(&cv)
    });
    let wavefunctions = vecs
        .iter()
        .map(|v| v.iter().map(|a| a * inv_sqrt_h).collect())
        .collect();
    Ok(MatterBasis {
        energies: eig.values,
        x_elems,
        p_elems,
        x2_elems,
        wavefunctions,
        grid: model.grid,
    })
}

/// Truncated potential kernel `V(x, x′) = Σ_{i,j<k} W_ij ψ_i(x) ψ_j(x′)` on the grid.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub levels: usize,
    pub n: usize,
    /// Row-major `n × n` samples.
    pub values: Vec<f64>,
    /// Share of `∫∫ V²` carried by `|x − x′| > w`.
    pub off_diagonality: f64,
    pub width: f64,
}

impl Kernel {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

pub fn nonlocal_kernel(basis: &MatterBasis, model: &ParticleModel, k: usize) -> Result<Kernel> {
    nonlocal_kernel_with_width(basis, model, k, KERNEL_WIDTH)
}

pub fn nonlocal_kernel_with_width(basis: &MatterBasis, model: &ParticleModel, k: usize, width: f64) -> Result<Kernel> {
    if k < 1 || k > basis.len() {
        return Err(invalid("k", "need 1 <= k <= M"));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(invalid("width", "must be finite and > 0"));
    }
    let v = model.potential_samples()?;
    let n = basis.grid.n_points;
    let h = basis.grid.spacing();
    let psi = &basis.wavefunctions[..k];
    let mut w = vec![0.0f64; k * k];
    for i in 0..k {
        for j in 0..=i {
            let s: f64 = (0..n).map(|t| psi[i][t] * v[t] * psi[j][t]).sum::<f64>() * h;
            w[i * k + j] = s;
            w[j * k + i] = s;
        }
    }
    // Row a: Σ_i ψ_i(x_a) Σ_j W_ij ψ_j(x_b) = Σ_j c_j(a) ψ_j(x_b).
    let mut values = vec![0.0f64; n * n];
    let mut coeff = vec![0.0f64; k];
    for a in 0..n {
        for (j, c) in coeff.iter_mut().enumerate() {
            *c = (0..k).map(|i| psi[i][a] * w[i * k + j]).sum();
        }
        for b in a..n {
            let s: f64 = coeff.iter().zip(psi).map(|(c, p)| c * p[b]).sum();
            values[a * n + b] = s;
            values[b * n + a] = s;
        }
    }
    let xs = basis.grid.points();
    let (mut far, mut total) = (0.0f64, 0.0f64);
    for a in 0..n {
        for b in 0..n {
            let s = values[a * n + b] * values[a * n + b];
            total += s;
            if math::abs(xs[a] - xs[b]) > width {
                far += s;
            }
        }
    }
    Ok(Kernel {
        levels: k,
        n,
        values,
        off_diagonality: if total > 0.0 { far / total } else { 0.0 },
        width,
    })
}

/// Residuals of `e^{iqA₀x} O e^{−iqA₀x}` against `(p − qA₀)²/2m + V`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// `‖C − S‖_max / ‖O‖_max` over the whole grid operator.
    pub full_relative: f64,
    /// Same ratio after projecting onto the lowest [`IDENTITY_LEVELS`] states of `O`.
    pub projected_relative: f64,
    /// Largest difference between the lowest eigenvalues of `C` and `O`.
    pub spectral_deviation: f64,
    pub levels: usize,
}

pub fn check_minimal_coupling_identity(model: &ParticleModel, q_a0: f64) -> Result<IdentityReport> {
    model.validate()?;
    if !q_a0.is_finite() {
        return Err(invalid("q_a0", "must be finite"));
    }
    let o = model.hamiltonian()?;
    let phases: Vec<C64> = model
        .grid
        .points()
        .iter()
        .map(|&x| C64::new(math::cos(q_a0 * x), math::sin(q_a0 * x)))
        .collect();
    let conjugated = o.conjugate_by_diagonal(&phases)?;
    let mut substituted = o.add_scaled(-q_a0 / model.mass, &model.momentum());
    for i in 0..model.grid.n_points {
        let d = substituted.get(i, i) + C64::new(q_a0 * q_a0 / (2.0 * model.mass), 0.0);
        substituted.set(i, i, d);
    }
    let full_relative = conjugated.max_abs_diff(&substituted) / o.max_abs();

    let levels = IDENTITY_LEVELS.min(model.grid.n_points);
    let low = lowest_eigenpairs(&o, levels)?;
    let diff = conjugated.add_scaled(-1.0, &substituted);
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for i in 0..levels {
        for j in 0..levels {
            num = num.max(diff.sandwich(&low.vectors[i], &low.vectors[j]).norm());
            den = den.max(substituted.sandwich(&low.vectors[i], &low.vectors[j]).norm());
        }
    }
    let rotated = lowest_eigenpairs(&conjugated, levels)?;
    let spectral_deviation = low
        .values
        .iter()
        .zip(&rotated.values)
        .map(|(a, b)| math::abs(a - b))
        .fold(0.0, f64::max);
    Ok(IdentityReport {
        full_relative,
        projected_relative: num / den,
        spectral_deviation,
        levels,
    })
}

/// Treatment of `x²` in the dipole-gauge full model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum X2Mode {
    /// Grid matrix elements of `x²`.
    Exact,
    /// Square of the truncated `x` matrix.
    Projected,
}

/// Field and coupling settings for the full models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullCoupling {
    pub omega_c: f64,
    pub a0: f64,
    pub m_used: usize,
    pub cutoff: usize,
}

impl FullCoupling {
    fn validate(&self, basis: &MatterBasis) -> Result<()> {
        if !(self.omega_c.is_finite() && self.omega_c > 0.0) {
            return Err(invalid("omega_c", "must be finite and > 0"));
        }
        if !self.a0.is_finite() {
            return Err(invalid("a0", "must be finite"));
        }
        if self.m_used < 1 || self.m_used > basis.len() {
            return Err(Error::BasisTooSmall {
                size: basis.len(),
                level: self.m_used,
                shift: 0.0,
            });
        }
        FockSpace::new(self.cutoff)?;
        Ok(())
    }
}

/// `A₀` giving normalised coupling `η = q A₀ x₁₀`.
pub fn a0_for_eta(basis: &MatterBasis, model: &ParticleModel, eta: f64) -> f64 {
    eta / (model.charge * math::abs(basis.x10()))
}

fn leading(op: &OperatorMatrix, m: usize) -> OperatorMatrix {
    let idx: Vec<usize> = (0..m).collect();
    op.principal_block(&idx)
}

/// `ω_c a†a + H₀ + q²A₀²ω_c x² + i q ω_c A₀ x (a† − a)` on `M_used ⊗ Fock`.
pub fn build_full_h_d(
    model: &ParticleModel,
    basis: &MatterBasis,
    c: &FullCoupling,
    x2: X2Mode,
) -> Result<OperatorMatrix> {
    c.validate(basis)?;
    let m = c.m_used;
    let f = fock_ops(FockSpace::new(c.cutoff)?);
    let nf = c.cutoff + 1;
    let x = leading(&basis.x_elems, m);
    let x2m = match x2 {
        X2Mode::Exact => leading(&basis.x2_elems, m),
        X2Mode::Projected => x.matmul(&x).hermitian_part(),
    };
    let h0 = OperatorMatrix::from_diag(&basis.energies[..m]);
    let id_f = OperatorMatrix::identity(nf);
    let q = model.charge;
    Ok(OperatorSum::new(m * nf)
        .add(c.omega_c, &kron(&OperatorMatrix::identity(m), &f.n_op)?)
        .add(1.0, &kron(&h0, &id_f)?)
        .add(q * q * c.a0 * c.a0 * c.omega_c, &kron(&x2m, &id_f)?)
        .add(q * c.omega_c * c.a0, &kron(&x, &f.momentum())?)
        .finish())
}

/// `ω_c a†a + H₀ − (q/m) A₀ p (a + a†) + (q²A₀²/2m)(a + a†)²` on `M_used ⊗ Fock`.
pub fn build_full_h_c(model: &ParticleModel, basis: &MatterBasis, c: &FullCoupling) -> Result<OperatorMatrix> {
    c.validate(basis)?;
    let m = c.m_used;
    let f = fock_ops(FockSpace::new(c.cutoff)?);
    let nf = c.cutoff + 1;
    let xf = f.position();
    let h0 = OperatorMatrix::from_diag(&basis.energies[..m]);
    let q = model.charge;
    let mass = model.mass;
    Ok(OperatorSum::new(m * nf)
        .add(c.omega_c, &kron(&OperatorMatrix::identity(m), &f.n_op)?)
        .add(1.0, &kron(&h0, &OperatorMatrix::identity(nf))?)
        .add(-q * c.a0 / mass, &kron(&leading(&basis.p_elems, m), &xf)?)
        .add(
            q * q * c.a0 * c.a0 / (2.0 * mass),
            &kron(&OperatorMatrix::identity(m), &xf.matmul(&xf).hermitian_part())?,
        )
        .finish())
}

/// `Σ_{n≥1} 2m ω_n0 |x_n0|²` over all retained levels.
pub fn trk_sum(basis: &MatterBasis, model: &ParticleModel) -> f64 {
    trk_sum_levels(basis, model, basis.len())
}

/// TRK sum over the lowest `levels` states (clamped to the basis size).
pub fn trk_sum_levels(basis: &MatterBasis, model: &ParticleModel, levels: usize) -> f64 {
    (1..levels.min(basis.len()))
        .map(|n| 2.0 * model.mass * basis.omega(n, 0) * basis.x_elems.get(n, 0).norm_sqr())
        .sum()
}
