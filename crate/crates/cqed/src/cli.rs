//! Command-line front end. Every flag is also accepted as a config key of
//! the same name; see [`crate::config`].
//!
//! Exit status: 0 on success, 1 for invalid input or configuration, 2 for a
//! numerical failure or a violated invariant (named on stderr).

use crate::config::Config;
use crate::error::{io_err, Error, Result};
use crate::experiments::{
    alpha_invariance_study, eta_grid, fluxonium_check, full_model_scan, gauge_theorem_study, particle_demo, run_sweep,
    taylor_study, with_threads, AlphaSpec, Convergence, Family, Gauge, SweepResult, SweepSpec, TaylorSpec, GAUGE_TOL,
    INTERIOR_TOL, TAYLOR_ACCURACY,
};
use crate::output::{
    parse_tabulated_potential, sweep_csv, sweep_script, sweep_table, taylor_csv, taylor_script, taylor_table,
    UNITS_LINE,
};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use cqed_core::fluxonium::FluxoniumParams;
use cqed_core::particle1d::{solve_particle, Grid, ParticleModel, X2Mode};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CQED_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "cqed", version, about = "Gauge-consistent truncated cavity-QED models")]
pub struct Cli {
    /// Configuration file of `key = value` lines; command-line flags win
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rabi-model transitions versus coupling for selected gauges
    #[command(args_override_self = true)]
    RabiSweep(SweepArgs),
    /// Dicke-model transitions versus coupling for selected gauges
    #[command(args_override_self = true)]
    DickeSweep(DickeArgs),
    /// Accuracy of truncated-series Coulomb models versus coupling
    #[command(args_override_self = true)]
    TaylorStudy(TaylorArgs),
    /// Spectral spread across the interpolating gauge family
    #[command(args_override_self = true)]
    AlphaCheck(AlphaArgs),
    /// Matrix identity between rotated dipole and Coulomb Hamiltonians
    #[command(args_override_self = true)]
    GaugeTheorem(GaugeArgs),
    /// Fluxonium levels and charge-gauge two-level models
    #[command(args_override_self = true)]
    Fluxonium(FluxoniumArgs),
    /// Grid particle: levels, sum rule, nonlocal kernel, minimal-coupling identity
    #[command(args_override_self = true)]
    ParticleDemo(ParticleArgs),
    /// Multi-level dipole and Coulomb models versus matter truncation
    #[command(args_override_self = true)]
    FullModel(FullModelArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::RabiSweep(_) => "rabi-sweep",
            Command::DickeSweep(_) => "dicke-sweep",
            Command::TaylorStudy(_) => "taylor-study",
            Command::AlphaCheck(_) => "alpha-check",
            Command::GaugeTheorem(_) => "gauge-theorem",
            Command::Fluxonium(_) => "fluxonium",
            Command::ParticleDemo(_) => "particle-demo",
            Command::FullModel(_) => "full-model",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Worker threads for parallel work (0 = one per core)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output CSV path [default: $CQED_OUT_DIR/<subcommand>.csv]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Also write a gnuplot whitespace table to this path
    #[arg(long, value_name = "PATH")]
    pub table: Option<PathBuf>,
    /// Write a gnuplot script next to the table (table defaults to the CSV path with .dat)
    #[arg(long)]
    pub emit_plots: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EtaArgs {
    /// Smallest normalized coupling g_D/omega_c
    #[arg(long, default_value_t = 0.0)]
    pub eta_min: f64,
    /// Largest normalized coupling
    #[arg(long, default_value_t = 1.5)]
    pub eta_max: f64,
    /// Coupling grid step
    #[arg(long, default_value_t = 0.025)]
    pub eta_step: f64,
}

impl EtaArgs {
    fn grid(&self) -> Result<Vec<f64>> {
        eta_grid(self.eta_min, self.eta_max, self.eta_step)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    /// Starting Fock cutoff for auto-convergence
    #[arg(long, default_value_t = 20)]
    pub initial_cutoff: usize,
    /// Cutoff growth factor between convergence steps
    #[arg(long, default_value_t = 2.0)]
    pub growth: f64,
    /// Largest transition change accepted as converged (units of omega_c)
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Largest matrix dimension before a point is flagged unconverged
    #[arg(long, default_value_t = cqed_core::linalg::DEFAULT_DIM_CAP)]
    pub dim_cap: usize,
}

impl From<&ConvergenceArgs> for Convergence {
    fn from(a: &ConvergenceArgs) -> Self {
        Convergence {
            initial_cutoff: a.initial_cutoff,
            growth: a.growth,
            tolerance: a.tolerance,
            dim_cap: a.dim_cap,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub eta: EtaArgs,
    /// Qubit detuning (omega_10 - omega_c)/omega_c
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub detuning: f64,
    /// Comma-separated models: D, Cstd, Ccorr, A<alpha>
    #[arg(long, default_value = "D,Cstd,Ccorr")]
    pub models: String,
    /// Number of transitions E_n - E_0 reported
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Diamagnetic coefficient of the standard Coulomb model [default: g_C^2/omega_10]
    #[arg(long)]
    pub diamagnetic: Option<f64>,
    #[command(flatten)]
    pub convergence: ConvergenceArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub plot: PlotArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DickeArgs {
    /// Number of identical dipoles
    #[arg(long, default_value_t = 4)]
    pub dipoles: usize,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TaylorArgs {
    #[command(flatten)]
    pub eta: EtaArgs,
    /// Qubit detuning (omega_10 - omega_c)/omega_c
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub detuning: f64,
    /// Comma-separated series orders
    #[arg(long, default_value = "2,3,200")]
    pub orders: String,
    /// Fixed Fock cutoff shared by the exact and truncated models
    #[arg(long, default_value_t = crate::experiments::TAYLOR_CUTOFF)]
    pub cutoff: usize,
    /// Transitions entering the error metric
    #[arg(long, default_value_t = crate::experiments::TAYLOR_LEVELS)]
    pub levels: usize,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub plot: PlotArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AlphaArgs {
    /// Comma-separated gauge parameters in [0, 1]
    #[arg(long, default_value = "0,0.25,0.5,0.75,1")]
    pub alphas: String,
    /// Single coupling; overrides the eta grid
    #[arg(long)]
    pub eta: Option<f64>,
    #[command(flatten)]
    pub grid: EtaArgs,
    /// Qubit detuning (omega_10 - omega_c)/omega_c
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub detuning: f64,
    /// Number of transitions compared
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Replace the alpha = 1 member by the standard Coulomb model (negative control)
    #[arg(long)]
    pub substitute_standard: bool,
    #[command(flatten)]
    pub convergence: ConvergenceArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GaugeArgs {
    /// Normalized coupling
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    /// Qubit detuning (omega_10 - omega_c)/omega_c
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub detuning: f64,
    /// Comma-separated ascending Fock cutoffs
    #[arg(long, default_value = "20,40,60,80,100")]
    pub cutoffs: String,
    /// Fraction of Fock levels per qubit sector in the interior block
    #[arg(long, default_value_t = cqed_core::rabi::INTERIOR_FRACTION)]
    pub interior_fraction: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FluxoniumArgs {
    /// Capacitive energy (units of omega_c)
    #[arg(long, default_value_t = 0.25)]
    pub ec: f64,
    /// Inductive energy (units of omega_c)
    #[arg(long, default_value_t = 0.15)]
    pub el: f64,
    /// Josephson energy (units of omega_c)
    #[arg(long, default_value_t = 1.0)]
    pub ej: f64,
    /// Oscillator-basis dimension of the fluxonium solver
    #[arg(long, default_value_t = 80)]
    pub basis_size: usize,
    /// LC oscillator frequency
    #[arg(long, default_value_t = 1.0)]
    pub omega_c: f64,
    /// Reduced-charge zero-point amplitude for the single-point check
    #[arg(long, default_value_t = 0.3)]
    pub chi0: f64,
    /// Fock cutoff for the single-point check
    #[arg(long, default_value_t = 40)]
    pub cutoff: usize,
    /// Number of transitions reported
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Comma-separated models for the sweep over g_C/omega_10: Cstd, Ccorr
    #[arg(long, default_value = "Cstd,Ccorr")]
    pub models: String,
    #[command(flatten)]
    pub eta: EtaArgs,
    #[command(flatten)]
    pub convergence: ConvergenceArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub plot: PlotArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Harmonic,
    DoubleWell,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum X2Arg {
    Exact,
    Projected,
}

#[derive(Debug, Clone, Args)]
pub struct MatterArgs {
    /// Built-in particle model
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Two-column `x V` file replacing the preset potential
    #[arg(long, value_name = "PATH")]
    pub potential_file: Option<PathBuf>,
    /// Grid half-width L (grid spans [-L, L])
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Number of matter eigenstates kept
    #[arg(long)]
    pub matter_levels: Option<usize>,
    /// Particle mass
    #[arg(long)]
    pub mass: Option<f64>,
    /// Particle charge
    #[arg(long, allow_negative_numbers = true)]
    pub charge: Option<f64>,
}

impl MatterArgs {
    fn model(&self, default: Preset) -> Result<ParticleModel> {
        let base = match self.preset.unwrap_or(default) {
            Preset::Harmonic => ParticleModel::harmonic_preset(),
            Preset::DoubleWell => ParticleModel::double_well_preset(),
            Preset::Identity => ParticleModel::identity_preset(),
        };
        let potential = match &self.potential_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(io_err(path))?;
                parse_tabulated_potential(&text)?
            }
            None => base.potential.clone(),
        };
        let half = self.half_width.unwrap_or(base.grid.x_max);
        let points = self.grid_points.unwrap_or(base.grid.n_points);
        Ok(ParticleModel::new(
            Grid::symmetric(half, points)?,
            potential,
            self.mass.unwrap_or(base.mass),
            self.charge.unwrap_or(base.charge),
            self.matter_levels.unwrap_or(base.eigen_count),
        )?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParticleArgs {
    #[command(flatten)]
    pub matter: MatterArgs,
    /// Comma-separated level counts for the nonlocal kernel
    #[arg(long, default_value = "2,4,8,16,32")]
    pub kernel_levels: String,
    /// Field amplitude q*A0 for the minimal-coupling identity
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub q_a0: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FullModelArgs {
    #[command(flatten)]
    pub matter: MatterArgs,
    /// Normalized coupling q*A0*x_10
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    /// Cavity frequency [default: matter omega_10]
    #[arg(long)]
    pub omega_c: Option<f64>,
    /// Fock cutoff
    #[arg(long, default_value_t = 40)]
    pub cutoff: usize,
    /// Comma-separated matter truncations
    #[arg(long, default_value = "2,4,8,16,32")]
    pub m_values: String,
    /// Dipole self-energy from the grid x^2 or from x projected onto kept levels
    #[arg(long, value_enum, default_value_t = X2Arg::Exact)]
    pub x2: X2Arg,
    /// Number of transitions compared
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::Validation(format!("bad {what} entry `{}`", s.trim())))
        })
        .collect()
}

fn parse_models(text: &str) -> Result<Vec<Gauge>> {
    text.split(',').map(str::parse).collect()
}

fn default_path(sub: &str, ext: &str) -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
    dir.join(format!("{sub}.{ext}"))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    std::fs::write(path, content).map_err(io_err(path))
}

struct Outputs {
    csv: PathBuf,
    table: Option<PathBuf>,
    script: Option<PathBuf>,
}

impl Outputs {
    fn resolve(sub: &str, run: &RunArgs, plot: Option<&PlotArgs>) -> Self {
        let csv = run.out.clone().unwrap_or_else(|| default_path(sub, "csv"));
        let (table, script) = match plot {
            Some(p) => {
                let table = p
                    .table
                    .clone()
                    .or_else(|| p.emit_plots.then(|| csv.with_extension("dat")));
                let script = p
                    .emit_plots
                    .then(|| table.as_ref().expect("set above").with_extension("gp"));
                (table, script)
            }
            None => (None, None),
        };
        Self { csv, table, script }
    }
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

fn emit_sweep(sub: &str, result: &SweepResult, context: &str, out: &Outputs) -> Result<()> {
    write_file(&out.csv, &sweep_csv(result, context))?;
    if let Some(t) = &out.table {
        write_file(t, &sweep_table(result))?;
        if let Some(s) = &out.script {
            let blocks = result
                .rows
                .iter()
                .map(|r| r.model.as_str())
                .fold(Vec::<&str>::new(), |mut v, m| {
                    if !v.contains(&m) {
                        v.push(m);
                    }
                    v
                })
                .len();
            write_file(s, &sweep_script(&file_name(t), blocks, result.levels, sub))?;
        }
    }
    Ok(())
}

fn report_sweep(result: &SweepResult) -> Result<()> {
    let models: Vec<&str> = result
        .rows
        .iter()
        .map(|r| r.model.as_str())
        .fold(Vec::new(), |mut v, m| {
            if !v.contains(&m) {
                v.push(m);
            }
            v
        });
    for m in &models {
        let max_cutoff = result.rows_for(m).map(|r| r.cutoff).max().unwrap_or(0);
        println!(
            "{m}: {} points, largest cutoff {max_cutoff}",
            result.rows_for(m).count()
        );
    }
    for pair in models.windows(2) {
        if let Some(gap) = result.max_gap(pair[0], pair[1]) {
            println!("max |t({}) - t({})| = {gap:.3e}", pair[0], pair[1]);
        }
    }
    result.require_converged()
}

fn sweep_spec(args: &SweepArgs, family: Family) -> Result<SweepSpec> {
    let mut spec = SweepSpec::new(family, parse_models(&args.models)?, args.eta.grid()?);
    spec.detuning = args.detuning;
    spec.levels = args.levels;
    spec.diamagnetic = args.diamagnetic;
    spec.convergence = (&args.convergence).into();
    spec.validate()?;
    Ok(spec)
}

fn rabi_sweep(args: &SweepArgs) -> Result<()> {
    let spec = sweep_spec(args, Family::Rabi)?;
    let result = with_threads(args.run.threads, || run_sweep(&spec))??;
    let out = Outputs::resolve("rabi-sweep", &args.run, Some(&args.plot));
    emit_sweep("rabi-sweep", &result, "family = rabi", &out)?;
    report_sweep(&result)
}

fn dicke_sweep(args: &DickeArgs) -> Result<()> {
    let spec = sweep_spec(&args.sweep, Family::Dicke { dipoles: args.dipoles })?;
    let result = with_threads(args.sweep.run.threads, || run_sweep(&spec))??;
    let out = Outputs::resolve("dicke-sweep", &args.sweep.run, Some(&args.sweep.plot));
    emit_sweep(
        "dicke-sweep",
        &result,
        &format!("family = dicke; dipoles = {}", args.dipoles),
        &out,
    )?;
    report_sweep(&result)
}

fn taylor(args: &TaylorArgs) -> Result<()> {
    let spec = TaylorSpec {
        detuning: args.detuning,
        orders: parse_list(&args.orders, "order")?,
        eta_grid: args.eta.grid()?,
        cutoff: args.cutoff,
        levels: args.levels,
    };
    let study = with_threads(args.run.threads, || taylor_study(&spec))??;
    let out = Outputs::resolve("taylor-study", &args.run, Some(&args.plot));
    write_file(&out.csv, &taylor_csv(&study))?;
    if let Some(t) = &out.table {
        write_file(t, &taylor_table(&study))?;
        if let Some(s) = &out.script {
            write_file(s, &taylor_script(&file_name(t), study.curves.len()))?;
        }
    }
    for c in &study.curves {
        let star = c
            .threshold(&study.eta_grid, TAYLOR_ACCURACY)
            .map_or_else(|| "none".to_string(), |e| e.to_string());
        let ten = c
            .first_exceeding(&study.eta_grid, 0.1)
            .map_or_else(|| "never".to_string(), |e| e.to_string());
        println!(
            "order {}: eta* (1%) = {star}; first error > 10% at eta = {ten}",
            c.order
        );
    }
    Ok(())
}

fn alpha(args: &AlphaArgs) -> Result<()> {
    let grid = match args.eta {
        Some(e) => vec![e],
        None => args.grid.grid()?,
    };
    let mut spec = AlphaSpec::new(parse_list(&args.alphas, "alpha")?, grid);
    spec.detuning = args.detuning;
    spec.levels = args.levels;
    spec.convergence = (&args.convergence).into();
    spec.substitute_standard = args.substitute_standard;
    let report = with_threads(args.run.threads, || alpha_invariance_study(&spec))??;
    let mut csv = format!("{UNITS_LINE}; spread = max - min of t_n across alphas\neta,spread\n");
    for (eta, s) in &report.per_eta {
        writeln!(csv, "{eta},{s:.12e}").unwrap();
    }
    let out = Outputs::resolve("alpha-check", &args.run, None);
    write_file(&out.csv, &csv)?;
    let verdict = if report.passes() { "PASS" } else { "FAIL" };
    println!(
        "max spread = {:.3e} (eta = {}, level {}); threshold {GAUGE_TOL:e}: {verdict}",
        report.spread, report.worst_eta, report.worst_level
    );
    if report.passes() {
        Ok(())
    } else {
        Err(Error::Invariant(format!(
            "alpha invariance: spread {:.3e} exceeds {GAUGE_TOL:e}",
            report.spread
        )))
    }
}

fn gauge(args: &GaugeArgs) -> Result<()> {
    let cutoffs: Vec<usize> = parse_list(&args.cutoffs, "cutoff")?;
    let study = with_threads(args.run.threads, || {
        gauge_theorem_study(args.detuning, args.eta, &cutoffs, args.interior_fraction)
    })??;
    let mut csv = format!(
        "{UNITS_LINE}; deviations are max entrywise |U H_D U^+ + C - H_C|\ncutoff,interior_levels,full_deviation,interior_deviation,boundary_deviation,relative_full_deviation\n"
    );
    for r in &study.reports {
        writeln!(
            csv,
            "{},{},{:.12e},{:.12e},{:.12e},{:.12e}",
            r.cutoff,
            r.interior_levels,
            r.full_deviation,
            r.interior_deviation,
            r.boundary_deviation,
            r.relative_full_deviation
        )
        .unwrap();
        println!(
            "cutoff {:>4}: interior {:.3e}  full {:.3e}  relative {:.3e}",
            r.cutoff, r.interior_deviation, r.full_deviation, r.relative_full_deviation
        );
    }
    write_file(&Outputs::resolve("gauge-theorem", &args.run, None).csv, &csv)?;
    println!(
        "full-matrix deviation decreasing with cutoff: {}",
        if study.full_deviation_decreasing() {
            "yes"
        } else {
            "no (top Fock levels)"
        }
    );
    if study.interior_passes() {
        println!("interior block within {INTERIOR_TOL:e}: PASS");
        Ok(())
    } else {
        Err(Error::Invariant(format!(
            "interior-block deviation exceeds {INTERIOR_TOL:e} at the largest cutoff"
        )))
    }
}

fn fluxonium(args: &FluxoniumArgs) -> Result<()> {
    let params = FluxoniumParams::new(
        args.ec,
        args.el,
        args.ej,
        args.basis_size,
        args.omega_c,
        args.chi0,
        args.cutoff,
    )?;
    let check = fluxonium_check(&params, args.levels)?;
    println!(
        "omega_10 = {:.10}  phi_10 = {:.10}  g_C = {:.6}",
        check.basis.omega_10(),
        check.basis.phi_10(),
        check.g_c
    );
    println!(
        "standard t1 = {:.8}  corrected t1 = {:.8}",
        check.standard[0], check.correct[0]
    );
    println!(
        "closed form vs conjugation (interior) = {:.3e}",
        check.closed_vs_conjugation
    );
    println!("E_J = 0 levels vs oscillator = {:.3e}", check.harmonic_limit_error);
    let mut spec = SweepSpec::new(Family::Fluxonium(params), parse_models(&args.models)?, args.eta.grid()?);
    spec.levels = args.levels;
    spec.convergence = (&args.convergence).into();
    let result = with_threads(args.run.threads, || run_sweep(&spec))??;
    let out = Outputs::resolve("fluxonium", &args.run, Some(&args.plot));
    emit_sweep(
        "fluxonium",
        &result,
        &format!(
            "family = fluxonium; eta = g_C/omega_10; ec = {}; el = {}; ej = {}",
            args.ec, args.el, args.ej
        ),
        &out,
    )?;
    if check.closed_vs_conjugation > 1e-9 {
        return Err(Error::Invariant(
            "closed form and conjugation differ by more than 1e-9".into(),
        ));
    }
    if check.harmonic_limit_error > 1e-8 {
        return Err(Error::Invariant(
            "E_J = 0 levels deviate from the oscillator by more than 1e-8".into(),
        ));
    }
    report_sweep(&result)
}

fn particle(args: &ParticleArgs) -> Result<()> {
    let model = args.matter.model(Preset::Harmonic)?;
    let ks: Vec<usize> = parse_list(&args.kernel_levels, "kernel level")?;
    let demo = with_threads(args.run.threads, || particle_demo(&model, &ks, args.q_a0))??;
    let b = &demo.basis;
    let mut csv = String::from("# units: grid units (hbar = 1); energies of the bare particle\nquantity,index,value\n");
    for (i, e) in b.energies.iter().enumerate() {
        writeln!(csv, "energy,{i},{e:.12e}").unwrap();
    }
    for (m, s) in &demo.trk {
        writeln!(csv, "trk,{m},{s:.12e}").unwrap();
    }
    for (k, r) in &demo.kernel {
        writeln!(csv, "kernel_off_diagonality,{k},{r:.12e}").unwrap();
    }
    let id = &demo.identity;
    writeln!(csv, "identity_full_relative,0,{:.12e}", id.full_relative).unwrap();
    writeln!(csv, "identity_projected_relative,0,{:.12e}", id.projected_relative).unwrap();
    writeln!(csv, "identity_spectral_deviation,0,{:.12e}", id.spectral_deviation).unwrap();
    write_file(&Outputs::resolve("particle-demo", &args.run, None).csv, &csv)?;
    println!("omega_10 = {:.10}  x_10 = {:.10}", b.omega_10(), b.x10());
    if let Some((m, s)) = demo.trk.last() {
        println!("TRK sum over {m} levels = {s:.8}");
    }
    for (k, r) in &demo.kernel {
        println!("kernel with {k:>3} levels: off-diagonality {r:.4}");
    }
    println!(
        "minimal-coupling identity: full {:.3e}  projected {:.3e}  spectral {:.3e}",
        id.full_relative, id.projected_relative, id.spectral_deviation
    );
    Ok(())
}

fn full_model(args: &FullModelArgs) -> Result<()> {
    let model = args.matter.model(Preset::DoubleWell)?;
    let ms: Vec<usize> = parse_list(&args.m_values, "matter truncation")?;
    let x2 = match args.x2 {
        X2Arg::Exact => X2Mode::Exact,
        X2Arg::Projected => X2Mode::Projected,
    };
    let scan = with_threads(args.run.threads, || -> Result<_> {
        let basis = solve_particle(&model)?;
        let trk = cqed_core::particle1d::trk_sum(&basis, &model);
        Ok((
            full_model_scan(
                &model,
                &basis,
                args.eta,
                args.omega_c,
                args.cutoff,
                &ms,
                x2,
                args.levels,
            )?,
            trk,
        ))
    })??;
    let (scan, trk) = scan;
    let mut csv = format!(
        "# units: energies in units of omega_c = {}; gap = max |t_D - t_C| / omega_c\nm_used,gap",
        scan.omega_c
    );
    for k in 1..=args.levels {
        write!(csv, ",dipole_t{k}").unwrap();
    }
    for k in 1..=args.levels {
        write!(csv, ",coulomb_t{k}").unwrap();
    }
    csv.push('\n');
    for r in &scan.rows {
        write!(csv, "{},{:.12e}", r.m_used, r.gap).unwrap();
        for t in r.dipole.iter().chain(&r.coulomb) {
            write!(csv, ",{:.12e}", t / scan.omega_c).unwrap();
        }
        csv.push('\n');
        println!("M = {:>3}: gap {:.3e}", r.m_used, r.gap);
    }
    write_file(&Outputs::resolve("full-model", &args.run, None).csv, &csv)?;
    println!(
        "TRK sum over all kept levels = {trk:.8}; gap reduction {:.3e}",
        scan.reduction()
    );
    if trk < 0.999 {
        eprintln!("warning: TRK sum {trk:.4} < 0.999; the matter basis is too small for the full model");
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::RabiSweep(a) => rabi_sweep(a),
        Command::DickeSweep(a) => dicke_sweep(a),
        Command::TaylorStudy(a) => taylor(a),
        Command::AlphaCheck(a) => alpha(a),
        Command::GaugeTheorem(a) => gauge(a),
        Command::Fluxonium(a) => fluxonium(a),
        Command::ParticleDemo(a) => particle(a),
        Command::FullModel(a) => full_model(a),
    }
}

/// Locates `--config` and the subcommand token in raw arguments.
fn scan_args(args: &[OsString]) -> (Option<PathBuf>, Option<usize>) {
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    (config, sub)
}

/// Inserts config entries as flags right after the subcommand, so flags
/// typed by the user come later and override them.
fn inject_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let (path, sub_pos) = scan_args(&args);
    let (Some(path), Some(pos)) = (path, sub_pos) else {
        return Ok(args);
    };
    let name = args[pos].to_string_lossy().into_owned();
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(&name) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    let cfg = Config::parse(&path.to_string_lossy(), &text)?;
    let known_anywhere = |key: &str| {
        root.get_subcommands()
            .any(|s| s.get_arguments().any(|a| a.get_long() == Some(key)))
    };
    let mut injected: Vec<OsString> = Vec::new();
    for e in cfg.for_subcommand(&name) {
        let err = |message: String| Error::ConfigParse {
            path: cfg.path.clone(),
            line: e.line,
            message,
        };
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(e.key.as_str())) else {
            if e.section == crate::config::COMMON_SECTION && known_anywhere(&e.key) {
                continue;
            }
            return Err(err(format!("unknown key `{}` for {name}", e.key)));
        };
        if e.key == "config" {
            return Err(err("config files cannot include other config files".into()));
        }
        if arg.get_action().takes_values() {
            injected.push(format!("--{}={}", e.key, e.value).into());
        } else {
            match e.value.as_str() {
                "true" => injected.push(format!("--{}", e.key).into()),
                "false" => {}
                other => return Err(err(format!("`{}` expects true or false, found `{other}`", e.key))),
            }
        }
    }
    let mut out: Vec<OsString> = args[..=pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

/// Parses arguments (and the optional config file), runs the subcommand and
/// returns the process exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match inject_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error ({}): {e}", cli.command.name());
            e.exit_code()
        }
    }
}
