//! Convergence-controlled sweeps and the studies built on them.
//!
//! Every sweep point grows its Fock cutoff until the reported transitions
//! `E_n − E_0` stop moving, then records the transitions together with the
//! cutoff trail. Points run on the current rayon pool and are collected in
//! grid order, so the pool width never changes the result.

use crate::error::{Error, Result};
use cqed_core::dicke::{build_dicke_correct, build_dicke_dipole, build_dicke_standard, DickeMethod, DickeParams};
use cqed_core::fluxonium::{
    build_flux_charge_correct, build_flux_charge_standard, solve_fluxonium, FluxMethod, FluxoniumBasis, FluxoniumParams,
};
use cqed_core::linalg::{hermitian_eigvals, transitions, DEFAULT_DIM_CAP};
use cqed_core::particle1d::{
    a0_for_eta, build_full_h_c, build_full_h_d, check_minimal_coupling_identity, nonlocal_kernel, solve_particle,
    trk_sum_levels, FullCoupling, IdentityReport, MatterBasis, ParticleModel, X2Mode,
};
use cqed_core::rabi::{
    build_h_alpha, build_h_c_correct, build_h_c_standard, build_h_c_taylor, build_h_d, check_gauge_theorem_with,
    CorrectMethod, GaugeParam, GaugeTheoremReport, RabiParams,
};
use cqed_core::OperatorMatrix;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_LEVELS: usize = 6;
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Gauge-equivalence threshold in units of `ω_c`.
pub const GAUGE_TOL: f64 = 1e-6;
pub const TAYLOR_LEVELS: usize = 5;
pub const TAYLOR_ACCURACY: f64 = 0.01;
pub const TAYLOR_CUTOFF: usize = 200;
pub const INTERIOR_TOL: f64 = 1e-8;

/// Builds the default coupling grid `0, 0.025, …, 1.5`.
pub fn default_eta_grid() -> Vec<f64> {
    eta_grid(0.0, 1.5, 0.025).expect("valid default grid")
}

/// `min, min + step, …` up to `max` inclusive. Points are rounded to 1e-9
/// so that decimal steps print cleanly.
pub fn eta_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) || min < 0.0 || max < min {
        return Err(Error::Validation(format!("bad eta range [{min}, {max}]")));
    }
    if max == min {
        return Ok(vec![min]);
    }
    if step <= 0.0 {
        return Err(Error::Validation("eta step must be positive".into()));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| ((min + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gauge {
    Dipole,
    CoulombStandard,
    CoulombCorrect,
    Alpha(f64),
}

impl Gauge {
    pub fn label(&self) -> String {
        match self {
            Gauge::Dipole => "D".into(),
            Gauge::CoulombStandard => "Cstd".into(),
            Gauge::CoulombCorrect => "Ccorr".into(),
            Gauge::Alpha(a) => format!("A{a}"),
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "D" => Ok(Gauge::Dipole),
            "Cstd" => Ok(Gauge::CoulombStandard),
            "Ccorr" => Ok(Gauge::CoulombCorrect),
            other => other
                .strip_prefix('A')
                .and_then(|a| a.parse::<f64>().ok())
                .filter(|a| (0.0..=1.0).contains(a))
                .map(Gauge::Alpha)
                .ok_or_else(|| {
                    Error::Validation(format!("unknown model `{other}` (expected D, Cstd, Ccorr or A<alpha>)"))
                }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Rabi,
    Dicke {
        dipoles: usize,
    },
    /// Fluxonium two-level models. The sweep variable is `g_C/ω_10`, which
    /// fixes `χ₀`; the detuning is set by the fluxonium spectrum instead.
    Fluxonium(FluxoniumParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub initial_cutoff: usize,
    pub growth: f64,
    pub tolerance: f64,
    pub dim_cap: usize,
}

impl Default for Convergence {
    fn default() -> Self {
        Self {
            initial_cutoff: 20,
            growth: 2.0,
            tolerance: CONVERGENCE_TOL,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

impl Convergence {
    fn next(&self, cutoff: usize) -> usize {
        ((cutoff as f64 * self.growth).ceil() as usize).max(cutoff + 1)
    }

    fn validate(&self) -> Result<()> {
        if self.initial_cutoff < 1 || !(self.growth > 1.0) || !(self.tolerance > 0.0) {
            return Err(Error::Validation(
                "convergence needs initial cutoff >= 1, growth > 1 and a positive tolerance".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub models: Vec<Gauge>,
    pub eta_grid: Vec<f64>,
    pub detuning: f64,
    pub levels: usize,
    pub convergence: Convergence,
    /// Overrides the diamagnetic coefficient of the standard Coulomb model.
    pub diamagnetic: Option<f64>,
}

impl SweepSpec {
    pub fn new(family: Family, models: Vec<Gauge>, eta_grid: Vec<f64>) -> Self {
        Self {
            family,
            models,
            eta_grid,
            detuning: 0.0,
            levels: DEFAULT_LEVELS,
            convergence: Convergence::default(),
            diamagnetic: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::Validation("no models selected".into()));
        }
        if self.eta_grid.is_empty() || self.eta_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation(
                "eta grid must be nonempty and strictly ascending".into(),
            ));
        }
        if self.eta_grid.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::Validation("eta values must be finite and non-negative".into()));
        }
        if self.levels < 2 {
            return Err(Error::Validation("at least 2 levels must be reported".into()));
        }
        if !(self.detuning.is_finite() && self.detuning > -1.0) {
            return Err(Error::Validation("detuning must exceed -omega_c".into()));
        }
        self.convergence.validate()?;
        let first = self.dim(self.convergence.initial_cutoff);
        if first > self.convergence.dim_cap {
            return Err(Error::Validation(format!(
                "initial dimension {first} exceeds the cap {}",
                self.convergence.dim_cap
            )));
        }
        if self.levels + 1 > first {
            return Err(Error::Validation(
                "initial cutoff too small for the requested levels".into(),
            ));
        }
        match &self.family {
            Family::Rabi => {}
            Family::Dicke { dipoles } => {
                if *dipoles < 1 {
                    return Err(Error::Validation("need at least one dipole".into()));
                }
                if self.models.iter().any(|m| matches!(m, Gauge::Alpha(_))) {
                    return Err(Error::Validation(
                        "alpha gauges are available for the Rabi family only".into(),
                    ));
                }
            }
            Family::Fluxonium(p) => {
                p.validate()?;
                if self
                    .models
                    .iter()
                    .any(|m| !matches!(m, Gauge::CoulombStandard | Gauge::CoulombCorrect))
                {
                    return Err(Error::Validation("fluxonium sweeps support Cstd and Ccorr only".into()));
                }
            }
        }
        Ok(())
    }

    fn dim(&self, cutoff: usize) -> usize {
        let matter = match self.family {
            Family::Dicke { dipoles } => dipoles + 1,
            _ => 2,
        };
        matter * (cutoff + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceStep {
    pub cutoff: usize,
    /// Largest transition change from the previous cutoff.
    pub change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: String,
    pub eta: f64,
    pub cutoff: usize,
    pub converged: bool,
    pub transitions: Vec<f64>,
    pub trail: Vec<ConvergenceStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub detuning: f64,
    pub levels: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn rows_for<'a>(&'a self, model: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.model == model)
    }

    pub fn unconverged(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| !r.converged)
    }

    /// Fails with [`Error::CutoffCeiling`] on the first flagged point.
    pub fn require_converged(&self) -> Result<()> {
        match self.unconverged().next() {
            Some(r) => Err(Error::CutoffCeiling {
                model: r.model.clone(),
                eta: r.eta,
                cutoff: r.cutoff,
            }),
            None => Ok(()),
        }
    }

    /// Largest `|t_a − t_b|` over the shared grid and all reported levels.
    pub fn max_gap(&self, a: &str, b: &str) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for (ra, rb) in self.rows_for(a).zip(self.rows_for(b)) {
            debug_assert_eq!(ra.eta, rb.eta);
            let gap = max_abs_diff(&ra.transitions, &rb.transitions);
            worst = Some(worst.map_or(gap, |w| w.max(gap)));
        }
        worst
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs `f` on a pool of `threads` workers (0 selects the rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(f))
}

struct PointContext<'a> {
    spec: &'a SweepSpec,
    flux: Option<&'a FluxoniumBasis>,
}

impl PointContext<'_> {
    fn build(&self, gauge: Gauge, eta: f64, cutoff: usize) -> Result<OperatorMatrix> {
        let spec = self.spec;
        let h = match &spec.family {
            Family::Rabi => {
                let p = RabiParams::with_detuning(spec.detuning, eta, cutoff)?;
                match gauge {
                    Gauge::Dipole => build_h_d(&p)?,
                    Gauge::CoulombStandard => build_h_c_standard(&p, spec.diamagnetic)?,
                    Gauge::CoulombCorrect => build_h_c_correct(&p, CorrectMethod::ClosedForm)?,
                    Gauge::Alpha(a) => build_h_alpha(&p, GaugeParam::new(a)?)?,
                }
            }
            Family::Dicke { dipoles } => {
                let p = DickeParams::new(RabiParams::with_detuning(spec.detuning, eta, cutoff)?, *dipoles)?;
                match gauge {
                    Gauge::Dipole => build_dicke_dipole(&p)?,
                    Gauge::CoulombStandard => build_dicke_standard(&p, spec.diamagnetic)?,
                    Gauge::CoulombCorrect => build_dicke_correct(&p, DickeMethod::ClosedForm { factor: 2.0 })?,
                    Gauge::Alpha(_) => unreachable!("rejected by validation"),
                }
            }
            Family::Fluxonium(base) => {
                let basis = self.flux.expect("fluxonium basis solved before the sweep");
                let p = base.with_chi0(eta / basis.phi_10()).with_cutoff(cutoff);
                match gauge {
                    Gauge::CoulombStandard => build_flux_charge_standard(&p, basis)?,
                    Gauge::CoulombCorrect => build_flux_charge_correct(&p, basis, FluxMethod::ClosedForm)?,
                    _ => unreachable!("rejected by validation"),
                }
            }
        };
        Ok(h)
    }

    fn transitions_at(&self, gauge: Gauge, eta: f64, cutoff: usize) -> Result<Vec<f64>> {
        let h = self.build(gauge, eta, cutoff)?;
        Ok(transitions(&hermitian_eigvals(&h)?, self.spec.levels))
    }

    fn point(&self, gauge: Gauge, eta: f64) -> Result<SweepRow> {
        let conv = self.spec.convergence;
        let mut cutoff = conv.initial_cutoff;
        let mut current = self.transitions_at(gauge, eta, cutoff)?;
        let mut trail = vec![ConvergenceStep { cutoff, change: None }];
        let converged = loop {
            let next = conv.next(cutoff);
            if self.spec.dim(next) > conv.dim_cap {
                break false;
            }
            let refined = self.transitions_at(gauge, eta, next)?;
            let change = max_abs_diff(&current, &refined);
            trail.push(ConvergenceStep {
                cutoff: next,
                change: Some(change),
            });
            cutoff = next;
            current = refined;
            if change < conv.tolerance {
                break true;
            }
        };
        Ok(SweepRow {
            model: gauge.label(),
            eta,
            cutoff,
            converged,
            transitions: current,
            trail,
        })
    }
}

/// Transitions for every `(model, η)` pair at auto-converged cutoff. Points
/// that hit the dimension cap are kept and flagged `converged = false`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let flux = match &spec.family {
        Family::Fluxonium(p) => Some(solve_fluxonium(p)?),
        _ => None,
    };
    let ctx = PointContext {
        spec,
        flux: flux.as_ref(),
    };
    let items: Vec<(Gauge, f64)> = spec
        .models
        .iter()
        .flat_map(|&m| spec.eta_grid.iter().map(move |&e| (m, e)))
        .collect();
    let rows = items
        .par_iter()
        .map(|&(m, e)| ctx.point(m, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        detuning: spec.detuning,
        levels: spec.levels,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSpec {
    pub detuning: f64,
    pub orders: Vec<usize>,
    pub eta_grid: Vec<f64>,
    pub cutoff: usize,
    pub levels: usize,
}

impl Default for TaylorSpec {
    fn default() -> Self {
        Self {
            detuning: 0.0,
            orders: vec![2, 3, 200],
            eta_grid: default_eta_grid(),
            cutoff: TAYLOR_CUTOFF,
            levels: TAYLOR_LEVELS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorCurve {
    pub order: usize,
    /// Max over levels of `|t_n − t_n^exact| / max(t_n^exact, ω_c)`, per grid point.
    pub errors: Vec<f64>,
}

impl TaylorCurve {
    /// Largest grid η before the first point whose error exceeds `tol`.
    /// `None` when the first point already fails.
    pub fn threshold(&self, grid: &[f64], tol: f64) -> Option<f64> {
        match self.errors.iter().position(|&e| e > tol) {
            Some(0) => None,
            Some(k) => Some(grid[k - 1]),
            None => grid.last().copied(),
        }
    }

    pub fn first_exceeding(&self, grid: &[f64], tol: f64) -> Option<f64> {
        self.errors.iter().position(|&e| e > tol).map(|k| grid[k])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorStudy {
    pub eta_grid: Vec<f64>,
    pub cutoff: usize,
    pub curves: Vec<TaylorCurve>,
}

impl TaylorStudy {
    pub fn curve(&self, order: usize) -> Option<&TaylorCurve> {
        self.curves.iter().find(|c| c.order == order)
    }

    /// 1%-accuracy threshold for `order`.
    pub fn eta_star(&self, order: usize) -> Option<f64> {
        self.curve(order)?.threshold(&self.eta_grid, TAYLOR_ACCURACY)
    }
}

/// Truncated-series Coulomb models against the exact one at a fixed cutoff.
pub fn taylor_study(spec: &TaylorSpec) -> Result<TaylorStudy> {
    if spec.orders.is_empty() || spec.orders.iter().any(|&n| !(1..=1000).contains(&n)) {
        return Err(Error::Validation("Taylor orders must lie in 1..=1000".into()));
    }
    if spec.eta_grid.is_empty() || spec.levels < 1 || spec.cutoff < spec.levels {
        return Err(Error::Validation(
            "Taylor study needs a grid, levels >= 1 and cutoff >= levels".into(),
        ));
    }
    let per_eta = spec
        .eta_grid
        .par_iter()
        .map(|&eta| -> Result<Vec<f64>> {
            let p = RabiParams::with_detuning(spec.detuning, eta, spec.cutoff)?;
            let exact = transitions(
                &hermitian_eigvals(&build_h_c_correct(&p, CorrectMethod::ClosedForm)?)?,
                spec.levels,
            );
            spec.orders
                .iter()
                .map(|&n| {
                    let t = transitions(&hermitian_eigvals(&build_h_c_taylor(&p, n)?)?, spec.levels);
                    Ok(t.iter()
                        .zip(&exact)
                        .map(|(a, b)| (a - b).abs() / b.max(p.omega_c))
                        .fold(0.0, f64::max))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let curves = spec
        .orders
        .iter()
        .enumerate()
        .map(|(k, &order)| TaylorCurve {
            order,
            errors: per_eta.iter().map(|row| row[k]).collect(),
        })
        .collect();
    Ok(TaylorStudy {
        eta_grid: spec.eta_grid.clone(),
        cutoff: spec.cutoff,
        curves,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSpec {
    pub detuning: f64,
    pub alphas: Vec<f64>,
    pub eta_grid: Vec<f64>,
    pub levels: usize,
    pub convergence: Convergence,
    /// Replaces the `α = 1` member by the standard Coulomb model.
    pub substitute_standard: bool,
}

impl AlphaSpec {
    pub fn new(alphas: Vec<f64>, eta_grid: Vec<f64>) -> Self {
        Self {
            detuning: 0.0,
            alphas,
            eta_grid,
            levels: DEFAULT_LEVELS,
            convergence: Convergence::default(),
            substitute_standard: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub spread: f64,
    pub worst_eta: f64,
    pub worst_level: usize,
    pub per_eta: Vec<(f64, f64)>,
}

impl AlphaReport {
    pub fn passes(&self) -> bool {
        self.spread <= GAUGE_TOL
    }
}

/// Largest spread across the α family of any reported transition.
pub fn alpha_invariance_study(spec: &AlphaSpec) -> Result<AlphaReport> {
    if spec.alphas.is_empty() || spec.alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::Validation("alphas must be a nonempty subset of [0, 1]".into()));
    }
    let models: Vec<Gauge> = spec
        .alphas
        .iter()
        .map(|&a| {
            if spec.substitute_standard && a == 1.0 {
                Gauge::CoulombStandard
            } else {
                Gauge::Alpha(a)
            }
        })
        .collect();
    let labels: Vec<String> = models.iter().map(Gauge::label).collect();
    let mut sweep = SweepSpec::new(Family::Rabi, models, spec.eta_grid.clone());
    sweep.detuning = spec.detuning;
    sweep.levels = spec.levels;
    sweep.convergence = spec.convergence;
    let result = run_sweep(&sweep)?;
    result.require_converged()?;
    let n_eta = spec.eta_grid.len();
    let mut report = AlphaReport {
        spread: 0.0,
        worst_eta: spec.eta_grid[0],
        worst_level: 1,
        per_eta: Vec::with_capacity(n_eta),
    };
    for (i, &eta) in spec.eta_grid.iter().enumerate() {
        let rows: Vec<&SweepRow> = labels
            .iter()
            .map(|l| result.rows_for(l).nth(i).expect("row per grid point"))
            .collect();
        let mut at_eta = 0.0f64;
        for level in 0..spec.levels {
            let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.transitions[level]), hi.max(r.transitions[level]))
            });
            let spread = hi - lo;
            if spread > report.spread {
                report.spread = spread;
                report.worst_eta = eta;
                report.worst_level = level + 1;
            }
            at_eta = at_eta.max(spread);
        }
        report.per_eta.push((eta, at_eta));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTheoremStudy {
    pub eta: f64,
    pub reports: Vec<GaugeTheoremReport>,
}

impl GaugeTheoremStudy {
    /// Interior-block identity at the largest cutoff.
    pub fn interior_passes(&self) -> bool {
        self.reports
            .last()
            .is_some_and(|r| r.interior_deviation <= INTERIOR_TOL)
    }

    /// Whether the full-matrix deviation strictly decreases with cutoff.
    pub fn full_deviation_decreasing(&self) -> bool {
        self.reports
            .windows(2)
            .all(|w| w[1].full_deviation < w[0].full_deviation)
    }
}

pub fn gauge_theorem_study(
    detuning: f64,
    eta: f64,
    cutoffs: &[usize],
    interior_fraction: f64,
) -> Result<GaugeTheoremStudy> {
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(
            "cutoffs must be nonempty and strictly ascending".into(),
        ));
    }
    let reports = cutoffs
        .par_iter()
        .map(|&c| {
            Ok(check_gauge_theorem_with(
                &RabiParams::with_detuning(detuning, eta, c)?,
                interior_fraction,
            )?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaugeTheoremStudy { eta, reports })
}

#[derive(Debug, Clone)]
pub struct ParticleDemo {
    pub basis: MatterBasis,
    /// `(M, Σ_{n<M} 2mω_n0|x_n0|²)`.
    pub trk: Vec<(usize, f64)>,
    /// `(k, off-diagonality of the k-level kernel)`.
    pub kernel: Vec<(usize, f64)>,
    pub identity: IdentityReport,
}

pub fn particle_demo(model: &ParticleModel, kernel_levels: &[usize], q_a0: f64) -> Result<ParticleDemo> {
    let basis = solve_particle(model)?;
    let trk = (2..=basis.len())
        .map(|m| (m, trk_sum_levels(&basis, model, m)))
        .collect();
    let kernel = kernel_levels
        .par_iter()
        .map(|&k| Ok((k, nonlocal_kernel(&basis, model, k)?.off_diagonality)))
        .collect::<Result<Vec<_>>>()?;
    let identity = check_minimal_coupling_identity(model, q_a0)?;
    Ok(ParticleDemo {
        basis,
        trk,
        kernel,
        identity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullModelRow {
    pub m_used: usize,
    pub dipole: Vec<f64>,
    pub coulomb: Vec<f64>,
    /// `max |t_D − t_C| / ω_c`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullModelScan {
    pub eta: f64,
    pub omega_c: f64,
    pub a0: f64,
    pub cutoff: usize,
    pub rows: Vec<FullModelRow>,
}

impl FullModelScan {
    /// Gap at the first `M` over gap at the last.
    pub fn reduction(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => a.gap / b.gap,
            _ => f64::NAN,
        }
    }
}

/// Full dipole vs Coulomb models as the number of kept matter levels grows.
/// `omega_c` defaults to the matter transition `ω_10`.
pub fn full_model_scan(
    model: &ParticleModel,
    basis: &MatterBasis,
    eta: f64,
    omega_c: Option<f64>,
    cutoff: usize,
    m_values: &[usize],
    x2: X2Mode,
    levels: usize,
) -> Result<FullModelScan> {
    if m_values.is_empty() || m_values.iter().any(|&m| m < 2) {
        return Err(Error::Validation("matter truncations must be >= 2".into()));
    }
    let omega_c = omega_c.unwrap_or_else(|| basis.omega_10());
    let a0 = a0_for_eta(basis, model, eta);
    let rows = m_values
        .par_iter()
        .map(|&m_used| -> Result<FullModelRow> {
            let c = FullCoupling {
                omega_c,
                a0,
                m_used,
                cutoff,
            };
            let dipole = transitions(&hermitian_eigvals(&build_full_h_d(model, basis, &c, x2)?)?, levels);
            let coulomb = transitions(&hermitian_eigvals(&build_full_h_c(model, basis, &c)?)?, levels);
            let gap = max_abs_diff(&dipole, &coulomb) / omega_c;
            Ok(FullModelRow {
                m_used,
                dipole,
                coulomb,
                gap,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FullModelScan {
        eta,
        omega_c,
        a0,
        cutoff,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxoniumCheck {
    pub basis: FluxoniumBasis,
    pub g_c: f64,
    /// Max entrywise `|closed form − conjugation|` over the interior block.
    pub closed_vs_conjugation: f64,
    pub standard: Vec<f64>,
    pub correct: Vec<f64>,
    /// Max deviation of the `E_J = 0` levels from `ω(n + 1/2)`.
    pub harmonic_limit_error: f64,
}

pub fn fluxonium_check(p: &FluxoniumParams, levels: usize) -> Result<FluxoniumCheck> {
    let basis = solve_fluxonium(p)?;
    let conj = build_flux_charge_correct(p, &basis, FluxMethod::Conjugation)?;
    let closed = build_flux_charge_correct(p, &basis, FluxMethod::ClosedForm)?;
    let nf = p.field_dim();
    let keep = ((cqed_core::rabi::INTERIOR_FRACTION * nf as f64).floor() as usize).max(1);
    let interior: Vec<usize> = (0..keep).chain(nf..nf + keep).collect();
    let closed_vs_conjugation = conj
        .principal_block(&interior)
        .max_abs_diff(&closed.principal_block(&interior));
    let standard = transitions(&hermitian_eigvals(&build_flux_charge_standard(p, &basis)?)?, levels);
    let correct = transitions(&hermitian_eigvals(&closed)?, levels);
    let quadratic = FluxoniumParams { e_j: 0.0, ..*p };
    let w = quadratic.plasma_frequency();
    let harmonic_limit_error = solve_fluxonium(&quadratic)?
        .energies
        .iter()
        .enumerate()
        .map(|(n, e)| (e - w * (n as f64 + 0.5)).abs())
        .fold(0.0, f64::max);
    Ok(FluxoniumCheck {
        g_c: basis.g_c(p.chi0),
        basis,
        closed_vs_conjugation,
        standard,
        correct,
        harmonic_limit_error,
    })
}
