//! `gwsr` command-line front end. Every subcommand resolves a [`RunConfig`],
//! computes, and writes CSV or JSON in one atomic step.

mod config;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use gwsr::emission::{peak_delta_gamma, peak_scan, sample_curve};
use gwsr::geometry::{to_physical, AtomicTransition, FrequencyConvention};
use gwsr::io::{fmt_num, CsvTable};
use gwsr::kernels::{f_gw_exact, f_gw_series, f_mink, f_tilde};
use gwsr::oracle::{run_suite, Suite};
use gwsr::shape_factor::{eta_error_bound, eta_max_with, sweep, EtaMaxOptions};
use gwsr::{angular, ArrayGeometry, GwKernel, GwSignal, InitialState, ShapeFactors};
use serde::Serialize;

use config::{Flags, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "gwsr", version, about = "Collective emission of an atomic array driven by a gravitational wave")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel values at one phase x.
    Kernel {
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        flags: Flags,
    },
    /// Shape factors mu_M, mu_GW and eta for one array.
    Shape(Flags),
    /// Separation where GW cooperation stops growing.
    EtaMax(Flags),
    /// Emission rate curve over time.
    Emission(Flags),
    /// Azimuthal emission densities.
    Angular(Flags),
    /// (mu_M N, eta) over an (N, beta) grid.
    Sweep(Flags),
    /// Peak imprint against N and its log-log slope.
    Scaling(Flags),
    /// SI quantities for a concrete transition.
    Physical(Flags),
    /// Oracle identities as JSON lines; exit 1 if any fails.
    Validate(Flags),
}

/// Why a run stopped.
enum Failure {
    Config(anyhow::Error),
    Validation,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

impl From<gwsr::Error> for Failure {
    fn from(e: gwsr::Error) -> Self {
        Failure::Config(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    let flags = match &command {
        Command::Kernel { flags, .. } => flags,
        Command::Shape(f)
        | Command::EtaMax(f)
        | Command::Emission(f)
        | Command::Angular(f)
        | Command::Sweep(f)
        | Command::Scaling(f)
        | Command::Physical(f)
        | Command::Validate(f) => f,
    };
    let cfg = flags.resolve()?;
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().context("starting worker pool")?;
    }
    let out = flags.out.as_deref();
    match command {
        Command::Kernel { x, .. } => write_out(out, &kernel_table(x, &cfg)?.to_csv()),
        Command::Shape(_) => write_out(out, &shape_table(&cfg)?.to_csv()),
        Command::EtaMax(_) => write_out(out, &eta_max_table(&cfg)?.to_csv()),
        Command::Emission(_) => {
            let geom = ArrayGeometry::new(cfg.single_n()?, cfg.single_beta()?)?;
            let state = InitialState::new(cfg.theta0, cfg.phi0)?;
            let curve =
                sample_curve(&geom, &signal(&cfg)?, state.theta0(), cfg.t_max, cfg.samples, cfg.series_threshold)?;
            write_out(out, &curve.to_table().to_csv())
        }
        Command::Angular(_) => {
            let geom = ArrayGeometry::new(cfg.single_n()?, cfg.single_beta()?)?;
            let state = InitialState::new(cfg.theta0, cfg.phi0)?;
            let profile = angular::angular_profile(
                &geom,
                &signal(&cfg)?,
                state.theta0(),
                cfg.t,
                cfg.phi_samples,
                cfg.quad_tol,
                cfg.series_threshold,
            )?;
            write_out(out, &profile.to_table().to_csv())
        }
        Command::Sweep(_) => {
            let grid = sweep(&cfg.n, &cfg.beta, cfg.omega_bar, cfg.series_threshold)?;
            write_out(out, &grid.to_table().to_csv())
        }
        Command::Scaling(_) => {
            let state = InitialState::new(cfg.theta0, cfg.phi0)?;
            let report =
                peak_scan(&cfg.n, cfg.single_beta()?, &signal(&cfg)?, state.theta0(), cfg.t_max, cfg.series_threshold)?;
            write_out(out, &report.to_table().to_csv())
        }
        Command::Physical(_) => {
            let report = physical(&cfg)?;
            write_out(out, &format!("{}\n", serde_json::to_string_pretty(&report).context("encoding report")?))
        }
        Command::Validate(_) => {
            let suite: Suite = cfg.suite.parse()?;
            let reports = run_suite(suite, cfg.tol)?;
            let text: String = reports.iter().map(|r| r.to_json_line() + "\n").collect();
            write_out(out, &text)?;
            if reports.iter().all(|r| r.pass) {
                Ok(())
            } else {
                Err(Failure::Validation)
            }
        }
    }
}

fn signal(cfg: &RunConfig) -> gwsr::Result<GwSignal> {
    GwSignal::new(cfg.h_plus, cfg.omega_bar)
}

/// Writes to a temporary file beside `path` and renames it into place, so a
/// failed run never leaves partial output.
fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes()).context("writing stdout")?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes()).context("writing output")?;
    tmp.persist(path).with_context(|| format!("moving output to {}", path.display()))?;
    Ok(())
}

const KERNEL_HEADER: [&str; 8] =
    ["x", "omega_bar", "f_mink", "f_tilde", "g_exact", "g_exact_err", "g_series", "g_series_err"];

fn kernel_table(x: f64, cfg: &RunConfig) -> anyhow::Result<CsvTable> {
    if !x.is_finite() {
        anyhow::bail!("x must be finite, got {x}");
    }
    GwSignal::new(0.0, cfg.omega_bar)?;
    let (exact, series) = (f_gw_exact(x, cfg.omega_bar), f_gw_series(x, cfg.omega_bar));
    let row = [x, cfg.omega_bar, f_mink(x), f_tilde(x), exact.value, exact.est_error, series.value, series.est_error];
    Ok(CsvTable::new(&KERNEL_HEADER, vec![row.iter().map(|&v| fmt_num(v)).collect()]))
}

const SHAPE_HEADER: [&str; 10] =
    ["N", "beta", "omega_bar", "h_plus", "muM", "muM_N", "mu_GW", "eta", "eta_error_bound", "mu_total"];

fn shape_table(cfg: &RunConfig) -> anyhow::Result<CsvTable> {
    let geom = ArrayGeometry::new(cfg.single_n()?, cfg.single_beta()?)?;
    let sig = signal(cfg)?;
    let sf = ShapeFactors::compute(&geom, &sig, cfg.series_threshold)?;
    let bound = eta_error_bound(&geom, &GwKernel::new(cfg.omega_bar, cfg.series_threshold)?);
    let n = geom.n_atoms() as f64;
    let row = [
        n,
        geom.beta(),
        sig.omega_bar(),
        sig.h_plus(),
        sf.mu_mink,
        sf.mu_mink * n,
        sf.mu_gw,
        sf.eta,
        bound,
        sf.mu_total,
    ];
    Ok(CsvTable::new(&SHAPE_HEADER, vec![row.iter().map(|&v| fmt_num(v)).collect()]))
}

const ETA_MAX_HEADER: [&str; 4] = ["beta", "omega_bar", "method", "j_star"];

fn eta_max_table(cfg: &RunConfig) -> anyhow::Result<CsvTable> {
    let beta = cfg.single_beta()?;
    let opts = EtaMaxOptions { method: cfg.method, series_threshold: cfg.series_threshold, ..Default::default() };
    let j = eta_max_with(beta, cfg.omega_bar, &opts)?;
    let method = serde_json::to_value(cfg.method)?.as_str().unwrap_or_default().to_string();
    Ok(CsvTable::new(&ETA_MAX_HEADER, vec![vec![fmt_num(beta), fmt_num(cfg.omega_bar), method, fmt_num(j as f64)]]))
}

#[derive(Debug, Serialize)]
struct PhysicalReport {
    n: u64,
    beta: f64,
    lambda0_m: f64,
    gamma0_per_s: f64,
    omega0_rad_per_s: f64,
    gw_angular_frequency_rad_per_s: f64,
    gw_frequency_hz: f64,
    array_length_m: f64,
    xi: f64,
    bath_time_s: f64,
    eta: f64,
    mu_m_n: f64,
    peak_delta_gamma_hz: f64,
    peak_time_s: f64,
    dark_count_rate_hz: f64,
    above_dark_counts: bool,
}

fn physical(cfg: &RunConfig) -> anyhow::Result<PhysicalReport> {
    let n = cfg.single_n()?;
    let geom = ArrayGeometry::new(n, cfg.single_beta()?)?;
    let tr = AtomicTransition::from_wavelength(cfg.lambda0, cfg.gamma0)?;
    let state = InitialState::new(cfg.theta0, cfg.phi0)?;
    let sig = signal(cfg)?;
    let sf = ShapeFactors::compute(&geom, &sig, cfg.series_threshold)?;
    let peak = peak_delta_gamma(n, &sf, state.theta0(), cfg.t_max)?;
    let phys = to_physical(&geom, &tr);
    let w = sig.omega_bar();
    let peak_hz = peak.value.abs() * tr.gamma0();
    Ok(PhysicalReport {
        n,
        beta: geom.beta(),
        lambda0_m: tr.lambda0(),
        gamma0_per_s: tr.gamma0(),
        omega0_rad_per_s: tr.omega0(),
        gw_angular_frequency_rad_per_s: w * tr.frequency(FrequencyConvention::Angular),
        gw_frequency_hz: w * tr.frequency(FrequencyConvention::Ordinary),
        array_length_m: phys.length,
        xi: phys.xi,
        bath_time_s: phys.bath_time,
        eta: sf.eta,
        mu_m_n: sf.mu_mink * n as f64,
        peak_delta_gamma_hz: peak_hz,
        peak_time_s: peak.t / tr.gamma0(),
        dark_count_rate_hz: cfg.dark_count_rate,
        above_dark_counts: peak_hz > cfg.dark_count_rate,
    })
}
