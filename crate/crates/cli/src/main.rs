//! `mesojj` — deterministic parameter sweeps over the mesoscopic-junction
//! library: charge bands, SQUID double wells, interwell escape rates, and
//! charge-detector noise figures. Each run writes `<name>.csv` (the curve)
//! and `<name>.summary.json` (parameter echo, version, timing, per-point
//! flags).
//!
//! Exit codes: 0 success, 1 I/O, 2 configuration, 3 convergence,
//! 4 singular system.

mod config;
mod report;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use config::{require, CliError, ConfigFile, GridSpec, Resolver};
use mesojj::bands::{self, BandsError};
use mesojj::detector::{self, DetectorError};
use mesojj::flux::{self, FluxError, SweepMode, ThreeLevelParams};
use mesojj::numerics::NumericsError;
use mesojj::qubit::{self, QubitError};

// ───────────────────────────── command line ─────────────────────────────

#[derive(Parser)]
#[command(
    name = "mesojj",
    version,
    about = "Parameter sweeps for mesoscopic junction circuits, written as CSV curves plus JSON run summaries",
    after_help = "Config files hold `key = value` lines under [bands]/[squid]/[flux-rate]/\n\
                  [detector]/[run] headers; flags mirror config keys 1:1 and take\n\
                  precedence. Identical configurations produce bit-identical CSV\n\
                  regardless of --threads."
)]
struct Cli {
    /// Configuration file; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<std::path::PathBuf>,

    /// Output base name: writes <NAME>.csv and <NAME>.summary.json
    /// (default: the subcommand name; config key `output` in [run]).
    #[arg(long, global = true, value_name = "NAME")]
    output: Option<String>,

    /// Worker threads for the sweep (default: MESOJJ_THREADS if set,
    /// else machine parallelism; config key `threads` in [run]).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest junction energy bands, thermal mean charge, and voltage
    /// over an offset-charge grid.
    Bands(BandsArgs),
    /// SQUID double-well geometry, per-well plasma frequencies, and
    /// two-level bias over an external-flux grid.
    Squid(SquidArgs),
    /// Interwell escape rate of the driven three-level flux system over
    /// a drive-detuning grid.
    #[command(name = "flux-rate")]
    FluxRate(FluxRateArgs),
    /// Charge-detector noise figures, energy sensitivity, and
    /// signal-to-noise ratio over a scaled level-position grid.
    Detector(DetectorArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bands(_) => "bands",
            Command::Squid(_) => "squid",
            Command::FluxRate(_) => "flux-rate",
            Command::Detector(_) => "detector",
        }
    }
}

#[derive(Args)]
struct BandsArgs {
    /// Charging energy E_C (> 0).
    #[arg(long = "e-c", value_name = "E", allow_negative_numbers = true)]
    e_c: Option<f64>,
    /// Josephson coupling E_J (>= 0).
    #[arg(long = "e-j", value_name = "E", allow_negative_numbers = true)]
    e_j: Option<f64>,
    /// Offset-charge grid START:STOP:POINTS.
    #[arg(long = "q-grid", value_name = "START:STOP:POINTS", allow_hyphen_values = true)]
    q_grid: Option<String>,
    /// Temperature entering the free energy and voltage (default 0).
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    temp: Option<f64>,
    /// Number of band-energy columns eps0..epsK to emit (default 3).
    #[arg(long, value_name = "K")]
    levels: Option<usize>,
    /// Fixed charge-basis truncation; omit to let it grow until converged.
    #[arg(long = "n-max", value_name = "N")]
    n_max: Option<usize>,
}

#[derive(Args)]
struct SquidArgs {
    /// Josephson coupling E_J (> 0).
    #[arg(long = "e-j", value_name = "E", allow_negative_numbers = true)]
    e_j: Option<f64>,
    /// Charging energy E_C (> 0) of the junction capacitance.
    #[arg(long = "e-c", value_name = "E", allow_negative_numbers = true)]
    e_c: Option<f64>,
    /// Inductive energy E_L (> 0) of the SQUID loop.
    #[arg(long = "e-l", value_name = "E", allow_negative_numbers = true)]
    e_l: Option<f64>,
    /// External-flux phase grid START:STOP:POINTS (radians).
    #[arg(long = "phi-e-grid", value_name = "START:STOP:POINTS", allow_hyphen_values = true)]
    phi_e_grid: Option<String>,
}

#[derive(Args)]
struct FluxRateArgs {
    /// Drive-detuning grid START:STOP:POINTS.
    #[arg(long = "nu-grid", value_name = "START:STOP:POINTS", allow_hyphen_values = true)]
    nu_grid: Option<String>,
    /// Intrawell level splitting offset eps (default 0).
    #[arg(long, value_name = "E", allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Drive amplitude a (>= 0).
    #[arg(long, value_name = "A", allow_negative_numbers = true)]
    a: Option<f64>,
    /// Interwell tunnel coupling Delta (> 0).
    #[arg(long, value_name = "D", allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Relaxation rate of the driven intrawell transition (>= 0).
    #[arg(long, value_name = "R", allow_negative_numbers = true)]
    gamma1: Option<f64>,
    /// Relaxation rate of the post-tunneling transition (>= 0).
    #[arg(long, value_name = "R", allow_negative_numbers = true)]
    gamma2: Option<f64>,
    /// Interwell bath coupling strength g (>= 0, default 0).
    #[arg(long, value_name = "G", allow_negative_numbers = true)]
    g: Option<f64>,
    /// Bath temperature (>= 0, default 0).
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    temp: Option<f64>,
    /// Rate model: full, intrawell-only, or strong-relaxation (default full).
    #[arg(long, value_name = "MODE")]
    mode: Option<String>,
}

#[derive(Args)]
struct DetectorArgs {
    /// Scaled level-position sweep z=START:STOP:POINTS, where
    /// z = (mu_1 - eps) / gamma in the deep-collector regime.
    #[arg(long, value_name = "z=START:STOP:POINTS", allow_hyphen_values = true)]
    sweep: Option<String>,
    /// Tunnel-coupling ratio gamma1/gamma2 (> 0, default 1); the sum
    /// gamma1 + gamma2 is normalized to 1.
    #[arg(long = "gamma-ratio", value_name = "R", allow_negative_numbers = true)]
    gamma_ratio: Option<f64>,
}

// ─────────────────────────── error classification ───────────────────────────

fn numerics_err(e: NumericsError) -> CliError {
    let msg = e.to_string();
    match e {
        NumericsError::InvalidMatrix(_) => CliError::Config(msg),
        NumericsError::SingularSystem { .. } => CliError::Singular(msg),
        NumericsError::ToleranceNotMet { .. }
        | NumericsError::InvalidFunction { .. }
        | NumericsError::IterationLimit { .. } => CliError::Convergence(msg),
    }
}

fn bands_err(e: BandsError) -> CliError {
    let msg = e.to_string();
    match e {
        BandsError::InvalidParams(_) => CliError::Config(msg),
        BandsError::Truncation { .. } => CliError::Convergence(msg),
        BandsError::Numerics(n) => numerics_err(n),
    }
}

fn qubit_err(e: QubitError) -> CliError {
    // Both variants describe an invalid parameter regime for the request.
    CliError::Config(e.to_string())
}

fn flux_err(e: FluxError) -> CliError {
    let msg = e.to_string();
    match e {
        FluxError::InvalidParams(_) => CliError::Config(msg),
        FluxError::DegenerateStationaryState => CliError::Singular(msg),
        FluxError::StationaryResidual { .. } => CliError::Convergence(msg),
        FluxError::Numerics(n) => numerics_err(n),
    }
}

fn detector_err(e: DetectorError) -> CliError {
    let msg = e.to_string();
    match e {
        DetectorError::InvalidParams(_) => CliError::Config(msg),
        DetectorError::ZeroResponse | DetectorError::ZeroNoise => CliError::Singular(msg),
        DetectorError::Numerics(n) => numerics_err(n),
    }
}

// ───────────────────────────── sweep execution ─────────────────────────────

/// Evaluate `f` over the grid on the worker pool. Results keep grid order
/// regardless of thread count; the first failing point (in grid order)
/// aborts the run with its location attached.
fn par_grid<F>(
    pool: &rayon::ThreadPool,
    grid: &[f64],
    var: &str,
    f: F,
) -> Result<Vec<Vec<f64>>, CliError>
where
    F: Fn(f64) -> Result<Vec<f64>, CliError> + Sync,
{
    let results: Vec<Result<Vec<f64>, CliError>> =
        pool.install(|| grid.par_iter().map(|&x| f(x)).collect());
    let mut rows = Vec::with_capacity(results.len());
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => return Err(e.at_point(i, var, grid[i])),
        }
    }
    Ok(rows)
}

/// Shared run machinery: worker pool, output base name, override record.
struct Runner {
    pool: rayon::ThreadPool,
    threads: usize,
    base: String,
    overridden: Vec<String>,
}

impl Runner {
    /// Emit the CSV and JSON summary for a completed sweep.
    fn finish(
        &self,
        subcommand: &str,
        parameters: serde_json::Value,
        extra: Option<(&str, serde_json::Value)>,
        header: &str,
        rows: &[Vec<f64>],
        started: Instant,
    ) -> Result<(), CliError> {
        let converged: Vec<bool> = rows
            .iter()
            .map(|row| row.iter().all(|v| v.is_finite()))
            .collect();
        let csv = report::csv_text(header, rows);
        let wall = started.elapsed().as_secs_f64();
        let mut summary = json!({
            "subcommand": subcommand,
            "version": env!("CARGO_PKG_VERSION"),
            "parameters": parameters,
            "overridden-by-flags": self.overridden,
            "threads": self.threads,
            "points": rows.len(),
            "converged": converged,
            "csv-file": format!("{}.csv", self.base),
            "wall-time-seconds": wall,
            "finished-unix-ms": SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
        });
        if let Some((key, value)) = extra {
            summary
                .as_object_mut()
                .expect("summary is an object")
                .insert(key.to_string(), value);
        }
        report::write_outputs(&self.base, &csv, &summary)?;
        println!(
            "wrote {0}.csv and {0}.summary.json ({1} points, {2:.3} s)",
            self.base,
            rows.len(),
            wall
        );
        Ok(())
    }
}

// ─────────────────────────── subcommand resolution ───────────────────────────

struct BandsRun {
    e_c: f64,
    e_j: f64,
    q_grid: GridSpec,
    temp: f64,
    levels: usize,
    n_max: Option<usize>,
}

fn resolve_bands(
    args: &BandsArgs,
    file: Option<&ConfigFile>,
) -> Result<(BandsRun, Vec<String>), CliError> {
    let mut r = Resolver::new(file, "bands");
    let run = BandsRun {
        e_c: r.f64("e-c", args.e_c, None)?,
        e_j: r.f64("e-j", args.e_j, None)?,
        q_grid: r.grid("q-grid", args.q_grid.as_deref())?,
        temp: r.f64("temp", args.temp, Some(0.0))?,
        levels: r.usize("levels", args.levels, Some(3))?,
        n_max: r.usize_opt("n-max", args.n_max)?,
    };
    require(run.e_c.is_finite() && run.e_c > 0.0, "e-c must be > 0")?;
    require(run.e_j.is_finite() && run.e_j >= 0.0, "e-j must be >= 0")?;
    require(run.temp.is_finite() && run.temp >= 0.0, "temp must be >= 0")?;
    require(run.levels >= 1, "levels must be >= 1")?;
    if let Some(n) = run.n_max {
        require(n >= 1, "n-max must be >= 1")?;
    }
    Ok((run, r.overridden))
}

fn run_bands(run: &BandsRun, runner: &Runner) -> Result<(), CliError> {
    let started = Instant::now();
    let grid = run.q_grid.values();
    let rows = par_grid(&runner.pool, &grid, "q", |q| {
        let row = bands::band_row(run.e_c, run.e_j, run.n_max, q, run.temp, run.levels)
            .map_err(bands_err)?;
        let mut v = Vec::with_capacity(run.levels + 3);
        v.push(row.q);
        v.extend_from_slice(&row.energies);
        v.push(row.avg_n);
        v.push(row.voltage);
        Ok(v)
    })?;
    let mut header = String::from("q");
    for k in 0..run.levels {
        header.push_str(&format!(",eps{k}"));
    }
    header.push_str(",avg_n,voltage");
    let parameters = json!({
        "e-c": run.e_c,
        "e-j": run.e_j,
        "q-grid": run.q_grid.canonical(),
        "temp": run.temp,
        "levels": run.levels,
        "n-max": run.n_max,
    });
    runner.finish("bands", parameters, None, &header, &rows, started)
}

struct SquidRun {
    e_j: f64,
    e_c: f64,
    e_l: f64,
    phi_e_grid: GridSpec,
}

fn resolve_squid(
    args: &SquidArgs,
    file: Option<&ConfigFile>,
) -> Result<(SquidRun, Vec<String>), CliError> {
    let mut r = Resolver::new(file, "squid");
    let run = SquidRun {
        e_j: r.f64("e-j", args.e_j, None)?,
        e_c: r.f64("e-c", args.e_c, None)?,
        e_l: r.f64("e-l", args.e_l, None)?,
        phi_e_grid: r.grid("phi-e-grid", args.phi_e_grid.as_deref())?,
    };
    require(run.e_j.is_finite() && run.e_j > 0.0, "e-j must be > 0")?;
    require(run.e_c.is_finite() && run.e_c > 0.0, "e-c must be > 0")?;
    require(run.e_l.is_finite() && run.e_l > 0.0, "e-l must be > 0")?;
    Ok((run, r.overridden))
}

fn run_squid(run: &SquidRun, runner: &Runner) -> Result<(), CliError> {
    let started = Instant::now();
    let grid = run.phi_e_grid.values();
    let rows = par_grid(&runner.pool, &grid, "phi-e", |phi_e| {
        let row = qubit::squid_row(run.e_j, run.e_c, run.e_l, phi_e).map_err(qubit_err)?;
        Ok(vec![
            row.phi_e,
            row.well.phi_left,
            row.well.phi_right,
            row.well.barrier_phi,
            row.omega_p_left,
            row.omega_p_right,
            row.bias,
        ])
    })?;
    let header = "phi_e,phi_left,phi_right,barrier_phi,omega_p_left,omega_p_right,bias";
    let parameters = json!({
        "e-j": run.e_j,
        "e-c": run.e_c,
        "e-l": run.e_l,
        "phi-e-grid": run.phi_e_grid.canonical(),
    });
    runner.finish("squid", parameters, None, header, &rows, started)
}

struct FluxRateRun {
    template: ThreeLevelParams,
    nu_grid: GridSpec,
    mode: SweepMode,
    mode_name: String,
}

fn parse_mode(text: &str) -> Result<SweepMode, CliError> {
    match text {
        "full" => Ok(SweepMode::Full),
        "intrawell-only" => Ok(SweepMode::IntrawellOnly),
        "strong-relaxation" => Ok(SweepMode::StrongRelaxation),
        other => Err(CliError::Config(format!(
            "mode must be one of full, intrawell-only, strong-relaxation (got `{other}`)"
        ))),
    }
}

fn resolve_flux_rate(
    args: &FluxRateArgs,
    file: Option<&ConfigFile>,
) -> Result<(FluxRateRun, Vec<String>), CliError> {
    let mut r = Resolver::new(file, "flux-rate");
    let nu_grid = r.grid("nu-grid", args.nu_grid.as_deref())?;
    let eps = r.f64("eps", args.eps, Some(0.0))?;
    let a = r.f64("a", args.a, None)?;
    let delta = r.f64("delta", args.delta, None)?;
    let gamma1 = r.f64("gamma1", args.gamma1, None)?;
    let gamma2 = r.f64("gamma2", args.gamma2, None)?;
    let g = r.f64("g", args.g, Some(0.0))?;
    let temp = r.f64("temp", args.temp, Some(0.0))?;
    let mode_name = r
        .string_opt("mode", args.mode.as_deref())?
        .unwrap_or_else(|| "full".to_string());
    let mode = parse_mode(&mode_name)?;
    require(delta.is_finite() && delta > 0.0, "delta must be > 0")?;
    // Remaining bounds (a, gamma1, gamma2, g, temp >= 0) are enforced by the
    // parameter constructor; its messages name the same keys as the flags.
    let template =
        ThreeLevelParams::new(0.0, eps, a, delta, gamma1, gamma2, g, temp).map_err(flux_err)?;
    Ok((
        FluxRateRun {
            template,
            nu_grid,
            mode,
            mode_name,
        },
        r.overridden,
    ))
}

fn run_flux_rate(run: &FluxRateRun, runner: &Runner) -> Result<(), CliError> {
    let started = Instant::now();
    let grid = run.nu_grid.values();
    let rows = par_grid(&runner.pool, &grid, "nu", |nu| {
        let row = flux::rate_row(&run.template.at_nu(nu), run.mode).map_err(flux_err)?;
        Ok(vec![row.nu, row.rate])
    })?;
    let rwa_strained: Vec<bool> = grid
        .iter()
        .map(|&nu| run.template.at_nu(nu).rwa_strained())
        .collect();
    let header = "nu,tau_inv";
    let parameters = json!({
        "nu-grid": run.nu_grid.canonical(),
        "eps": run.template.eps,
        "a": run.template.a,
        "delta": run.template.delta,
        "gamma1": run.template.gamma1,
        "gamma2": run.template.gamma2,
        "g": run.template.g,
        "temp": run.template.temp,
        "mode": run.mode_name,
    });
    runner.finish(
        "flux-rate",
        parameters,
        Some(("rwa-strained", json!(rwa_strained))),
        header,
        &rows,
        started,
    )
}

struct DetectorRun {
    sweep: GridSpec,
    gamma_ratio: f64,
}

fn resolve_detector(
    args: &DetectorArgs,
    file: Option<&ConfigFile>,
) -> Result<(DetectorRun, Vec<String>), CliError> {
    let mut r = Resolver::new(file, "detector");
    let sweep_text = r.string("sweep", args.sweep.as_deref())?;
    let body = sweep_text.strip_prefix("z=").ok_or_else(|| {
        CliError::Config(format!(
            "sweep must have the form z=START:STOP:POINTS (got `{sweep_text}`)"
        ))
    })?;
    let sweep = GridSpec::parse("sweep", body)?;
    let gamma_ratio = r.f64("gamma-ratio", args.gamma_ratio, Some(1.0))?;
    require(
        gamma_ratio.is_finite() && gamma_ratio > 0.0,
        "gamma-ratio must be > 0",
    )?;
    Ok((DetectorRun { sweep, gamma_ratio }, r.overridden))
}

fn run_detector(run: &DetectorRun, runner: &Runner) -> Result<(), CliError> {
    let started = Instant::now();
    // Normalize gamma1 + gamma2 = 1 at the requested ratio; the emitted
    // figures are dimensionless or scaled by the total broadening.
    let gamma1 = run.gamma_ratio / (1.0 + run.gamma_ratio);
    let gamma2 = 1.0 / (1.0 + run.gamma_ratio);
    let grid = run.sweep.values();
    let rows = par_grid(&runner.pool, &grid, "z", |z| {
        let row = detector::sensitivity_row(gamma1, gamma2, z).map_err(detector_err)?;
        Ok(vec![
            row.z,
            row.s_i,
            row.s_q,
            row.re_s_iq,
            row.lambda,
            row.eps_over_hbar,
            row.snr,
        ])
    })?;
    let header = "z,s_i,s_q,re_s_iq,lambda,eps_over_hbar,snr";
    let parameters = json!({
        "sweep": format!("z={}", run.sweep.canonical()),
        "gamma-ratio": run.gamma_ratio,
        "gamma1": gamma1,
        "gamma2": gamma2,
    });
    runner.finish("detector", parameters, None, header, &rows, started)
}

// ───────────────────────────── entry point ─────────────────────────────

fn resolve_runner(
    cli: &Cli,
    file: Option<&ConfigFile>,
    default_base: &str,
) -> Result<Runner, CliError> {
    let mut r = Resolver::new(file, "run");
    let threads = match r.usize_opt("threads", cli.threads)? {
        Some(t) => {
            require(t >= 1, "threads must be >= 1")?;
            t
        }
        None => match std::env::var("MESOJJ_THREADS") {
            Ok(s) => s
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&t| t >= 1)
                .ok_or_else(|| {
                    CliError::Config(format!(
                        "MESOJJ_THREADS must be a positive integer (got `{s}`)"
                    ))
                })?,
            Err(_) => std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        },
    };
    let base = r
        .string_opt("output", cli.output.as_deref())?
        .unwrap_or_else(|| default_base.to_string());
    require(!base.is_empty(), "output must not be empty")?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("cannot build worker pool: {e}")))?;
    Ok(Runner {
        pool,
        threads,
        base,
        overridden: r.overridden,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => Some(config::load(path)?),
        None => None,
    };
    let file = file.as_ref();
    let mut runner = resolve_runner(&cli, file, cli.command.name())?;
    match &cli.command {
        Command::Bands(args) => {
            let (params, overrides) = resolve_bands(args, file)?;
            runner.overridden.extend(overrides);
            runner.overridden.sort();
            run_bands(&params, &runner)
        }
        Command::Squid(args) => {
            let (params, overrides) = resolve_squid(args, file)?;
            runner.overridden.extend(overrides);
            runner.overridden.sort();
            run_squid(&params, &runner)
        }
        Command::FluxRate(args) => {
            let (params, overrides) = resolve_flux_rate(args, file)?;
            runner.overridden.extend(overrides);
            runner.overridden.sort();
            run_flux_rate(&params, &runner)
        }
        Command::Detector(args) => {
            let (params, overrides) = resolve_detector(args, file)?;
            runner.overridden.extend(overrides);
            runner.overridden.sort();
            run_detector(&params, &runner)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("mesojj: {e}");
        std::process::exit(e.exit_code());
    }
}
