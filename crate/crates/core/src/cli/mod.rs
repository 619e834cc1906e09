//! `pseudosun` command-line front end: load a JSON config, run one command,
//! write CSV tables and gnuplot scripts into an output directory.

pub mod config;
pub mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use sha2::{Digest, Sha256};

use crate::dynamics::evolve_unconditional;
use crate::error::Error;
use crate::fit::{fit_objective, fit_with_options, FitTarget};
use crate::heralded::{
    average_over_heralds_with, coincidence_signal, evolve_heralded, herald_frequency_grid, herald_times,
    heralded_field, FieldMethod,
};
use crate::numerics::{FrequencyGrid, TimeGrid};
use crate::pdc::{mean_photon_number, thermal_mean, PdcParams};
use crate::trajectory::normalize_trajectory;
use config::RunConfig;
use output::{Header, WriteError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Spectrum,
    Fit,
    Dynamics,
    Heralded,
    Coincidence,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Fit => "fit",
            Command::Dynamics => "dynamics",
            Command::Heralded => "heralded",
            Command::Coincidence => "coincidence",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pseudosun", version, about = "Pseudo-sunlight from CW parametric down-conversion")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Seed for multi-start fits and random herald sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Everything that can stop a run, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<WriteError> for CliError {
    fn from(e: WriteError) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Errors from validating config blocks.
fn config_err(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Errors raised while computing: bad combinations of otherwise valid inputs
/// are still the config's fault, the rest are numerical.
fn compute_err(e: Error) -> CliError {
    match e {
        Error::InvalidGrid(_) | Error::InvalidParams(_) | Error::InvalidInput(_) | Error::Precondition(_) => {
            CliError::Config(e.to_string())
        }
        Error::CannotNormalize(_) | Error::Numerical(_) | Error::FitDiverged { .. } => {
            CliError::Numerical(e.to_string())
        }
    }
}

/// Run one command; returns the paths written.
pub fn run(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let raw = std::fs::read(&args.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg: RunConfig = serde_json::from_slice(&raw)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let header = Header {
        config_sha256: hex::encode(Sha256::digest(&raw)),
        command: args.command.name(),
        extra: vec![("seed".into(), args.seed.to_string())],
    };
    let missing = || CliError::Config(format!("config has no `{}` block", args.command.name()));
    match args.command {
        Command::Spectrum => spectrum(cfg.spectrum.as_ref().ok_or_else(missing)?, &header, &args.out),
        Command::Fit => fit(cfg.fit.as_ref().ok_or_else(missing)?, &header, &args.out, args.seed),
        Command::Dynamics => dynamics(cfg.dynamics.as_ref().ok_or_else(missing)?, &header, &args.out),
        Command::Heralded => heralded(cfg.heralded.as_ref().ok_or_else(missing)?, &header, &args.out, args.seed),
        Command::Coincidence => coincidence(cfg.coincidence.as_ref().ok_or_else(missing)?, &header, &args.out),
    }
}

fn check_finite(what: &str, values: impl IntoIterator<Item = f64>) -> Result<(), CliError> {
    if values.into_iter().any(|v| !v.is_finite()) {
        return Err(CliError::Numerical(format!("{what} contains non-finite values")));
    }
    Ok(())
}

fn spectrum(c: &config::SpectrumConfig, header: &Header, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let p = c.pdc.validate().map_err(config_err)?;
    let t = c.thermal.validate().map_err(config_err)?;
    let grid = c.grid.frequency().map_err(config_err)?;
    let pdc = mean_photon_number(&grid, &p).map_err(compute_err)?;
    let th = thermal_mean(&grid, &t).map_err(compute_err)?;
    check_finite("spectrum", pdc.values().iter().chain(th.values()).copied())?;
    let rows = grid
        .points()
        .into_iter()
        .zip(pdc.values())
        .zip(th.values())
        .map(|((w, a), b)| vec![w, *a, *b]);
    let table = output::csv(&header.with("temperature_k", t.temperature), &["omega_cm1", "n_pdc", "n_thermal"], rows);
    let plot = output::gnuplot(
        "Mean photon number",
        "wavenumber (cm^-1)",
        "mean photon number",
        &[("spectrum.csv".into(), 2, "PDC".into()), ("spectrum.csv".into(), 3, "black body".into())],
    );
    Ok(vec![output::write_atomic(out, "spectrum.csv", &table)?, output::write_atomic(out, "spectrum.gp", &plot)?])
}

fn fit(c: &config::FitConfig, header: &Header, out: &Path, seed: u64) -> Result<Vec<PathBuf>, CliError> {
    let (problem, options) = c.validate(seed).map_err(config_err)?;
    let initial_objective = fit_objective(problem.initial(), &problem).map_err(compute_err)?;
    let result = fit_with_options(&problem, &options).map_err(compute_err)?;

    let mut report = String::new();
    let _ = writeln!(report, "# pseudosun {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(report, "# config_sha256 {}", header.config_sha256);
    let _ = writeln!(report, "# command fit");
    let _ = writeln!(report, "# seed {seed}");
    match problem.target() {
        FitTarget::Thermal(t) => {
            let _ = writeln!(report, "target = thermal {}", output::number(t.temperature));
        }
        FitTarget::Pdc(p) => {
            let _ = writeln!(report, "target = pdc {}", fmt_params(p));
        }
    }
    let _ = writeln!(report, "window = {} {} {}", problem.window().min(), problem.window().max(), problem.window().len());
    let free: Vec<&str> = problem.free().iter().map(|f| f.param.name()).collect();
    let _ = writeln!(report, "free = {}", free.join(" "));
    let _ = writeln!(report, "initial_objective = {}", output::number(initial_objective));
    let _ = writeln!(report, "objective = {}", output::number(result.objective_value));
    let _ = writeln!(report, "iterations = {}", result.iterations);
    let _ = writeln!(report, "converged = {}", result.converged);
    let p = result.params;
    let _ = writeln!(report, "pump_freq = {}", output::number(p.pump_freq));
    let _ = writeln!(report, "signal_center = {}", output::number(p.signal_center));
    let _ = writeln!(report, "entanglement_time = {}", output::number(p.entanglement_time));
    let _ = writeln!(report, "gain = {}", output::number(p.gain));
    let trace: Vec<String> = result.trace.iter().map(|v| output::number(*v)).collect();
    let _ = writeln!(report, "trace = {}", trace.join(" "));

    let fitted = mean_photon_number(problem.window(), &p).map_err(compute_err)?;
    let rows = problem
        .window()
        .points()
        .into_iter()
        .zip(fitted.values())
        .zip(problem.target_values())
        .map(|((w, a), b)| vec![w, *a, *b]);
    let table = output::csv(header, &["omega_cm1", "n_pdc", "n_target"], rows);
    let plot = output::gnuplot(
        "Fitted PDC spectrum",
        "wavenumber (cm^-1)",
        "mean photon number",
        &[("fit_spectrum.csv".into(), 2, "fitted PDC".into()), ("fit_spectrum.csv".into(), 3, "target".into())],
    );
    Ok(vec![
        output::write_atomic(out, "fit_report.txt", &report)?,
        output::write_atomic(out, "fit_spectrum.csv", &table)?,
        output::write_atomic(out, "fit.gp", &plot)?,
    ])
}

fn fmt_params(p: &PdcParams) -> String {
    [p.pump_freq, p.signal_center, p.entanglement_time, p.gain].map(output::number).join(" ")
}

fn dynamics(c: &config::DynamicsConfig, header: &Header, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let d = c.validate().map_err(config_err)?;
    let mut written = Vec::new();
    let mut series = Vec::new();
    let sources = [
        ("pdc", d.pdc.map(|p| mean_photon_number(&d.grid, &p))),
        ("thermal", d.thermal.map(|t| thermal_mean(&d.grid, &t))),
    ];
    for (name, spectrum) in sources {
        let Some(spectrum) = spectrum else { continue };
        let spectrum = spectrum.map_err(compute_err)?;
        let traj = evolve_unconditional(&d.molecule, &spectrum, &d.times).map_err(compute_err)?;
        let traj = normalize_trajectory(&traj, d.normalization).map_err(compute_err)?;
        check_finite(name, traj.matrices().iter().flat_map(|m| m.iter().flat_map(|z| [z.re, z.im])))?;
        let file = format!("dynamics_{name}.csv");
        let table = output::trajectory_csv(&header.with("source", name), &traj);
        written.push(output::write_atomic(out, &file, &table)?);
        series.push((file.clone(), 2, format!("{name} Re rho_11")));
        if traj.dim() > 1 {
            series.push((file, 4, format!("{name} Re rho_12")));
        }
    }
    let plot = output::gnuplot("Density matrix elements", "t (fs)", "normalized", &series);
    written.push(output::write_atomic(out, "dynamics.gp", &plot)?);
    Ok(written)
}

/// Exact-field grid wide enough for every lag between `times` and `heralds`.
fn field_grid(
    p: &PdcParams,
    times: &TimeGrid,
    heralds: &[f64],
    explicit: Option<FrequencyGrid>,
) -> Result<FrequencyGrid, CliError> {
    if let Some(g) = explicit {
        return Ok(g);
    }
    let max_lag = heralds
        .iter()
        .map(|ti| (times.min() - ti).abs().max((times.max() - ti).abs()))
        .fold(0.0, f64::max);
    herald_frequency_grid(p, max_lag).map_err(compute_err)
}

fn heralded(c: &config::HeraldedConfig, header: &Header, out: &Path, seed: u64) -> Result<Vec<PathBuf>, CliError> {
    let h = c.validate(seed).map_err(config_err)?;
    let mut heralds = h.herald_times.clone();
    if let Some(opts) = &h.average {
        heralds.extend(herald_times(&h.pdc, &h.times, opts).map_err(compute_err)?);
    }
    let grid = field_grid(&h.pdc, &h.times, &heralds, h.grid)?;
    let header = header.with("method", h.method.as_str());

    let mut written = Vec::new();
    let mut series = Vec::new();
    for (k, &ti) in h.herald_times.iter().enumerate() {
        let field = heralded_field(&h.times, ti, &h.pdc, &grid, h.method).map_err(compute_err)?;
        let traj = evolve_heralded(&h.molecule, &field).map_err(compute_err)?;
        let traj = traj.normalized(h.normalization).map_err(compute_err)?;
        let traj = traj.trajectory();
        check_finite("heralded", traj.matrices().iter().flat_map(|m| m.iter().flat_map(|z| [z.re, z.im])))?;
        let file = format!("heralded_{k}.csv");
        let table = output::trajectory_csv(&header.with("t_i_fs", output::number(ti)), traj);
        written.push(output::write_atomic(out, &file, &table)?);
        series.push((file, 2, format!("Re rho_11, t_i = {ti} fs")));
    }
    if let Some(opts) = &h.average {
        let avg = average_over_heralds_with(&h.molecule, &h.pdc, &grid, &h.times, opts).map_err(compute_err)?;
        let avg = normalize_trajectory(&avg, h.normalization).map_err(compute_err)?;
        check_finite("average", avg.matrices().iter().flat_map(|m| m.iter().flat_map(|z| [z.re, z.im])))?;
        let table = output::trajectory_csv(&header.with("herald_samples", opts.samples), &avg);
        written.push(output::write_atomic(out, "heralded_average.csv", &table)?);
        series.push(("heralded_average.csv".into(), 2, "Re rho_11, herald average".into()));
    }
    let plot = output::gnuplot("Heralded density matrix", "t (fs)", "normalized", &series);
    written.push(output::write_atomic(out, "heralded.gp", &plot)?);
    Ok(written)
}

fn coincidence(c: &config::CoincidenceConfig, header: &Header, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let s = c.validate().map_err(config_err)?;
    let grid = match s.method {
        FieldMethod::ExactQuadrature => field_grid(&s.pdc, &s.times, &[s.herald_time], s.grid)?,
        // Unused by the box field.
        FieldMethod::RectApprox => s.grid.map_or_else(|| FrequencyGrid::new(1.0, 2.0, 2).map_err(compute_err), Ok)?,
    };
    let field = heralded_field(&s.times, s.herald_time, &s.pdc, &grid, s.method).map_err(compute_err)?;
    let traj = evolve_heralded(&s.molecule, &field).map_err(compute_err)?;
    let signal = coincidence_signal(&s.molecule, &traj, &s.pdc).map_err(compute_err)?;
    let peak = signal.values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(CliError::Numerical(format!("coincidence signal peaks at {peak}")));
    }
    let rows = s.times.points().into_iter().zip(&signal.values).map(|(t, v)| vec![t, v / peak]);
    let header = header
        .with("method", s.method.as_str())
        .with("t_i_fs", output::number(s.herald_time))
        .with("normalization", "max_abs");
    let table = output::csv(&header, &["t_fs", "S"], rows);
    let plot = output::gnuplot("Coincidence signal", "t (fs)", "S (normalized)", &[("coincidence.csv".into(), 2, "S".into())]);
    Ok(vec![
        output::write_atomic(out, "coincidence.csv", &table)?,
        output::write_atomic(out, "coincidence.gp", &plot)?,
    ])
}

