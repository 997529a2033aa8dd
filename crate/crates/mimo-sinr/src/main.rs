//! Experiment runner for the downlink SINR library: reproduces the six
//! figure presets or any custom configuration, writing plot-ready density
//! curves and a metrics summary.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use mimo_sinr::density::GridSpec;
use mimo_sinr::experiment::{
    self, exit_code, init_thread_pool_from_env, list_presets, preset_runs, ExperimentReport,
    ExperimentSpec, OutputFormat, DEFAULT_GRID_POINTS, DEFAULT_SAMPLES,
};
use mimo_sinr::metrics::ModulationParams;
use mimo_sinr::{Error, Result, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModulationArg {
    /// SER constants alpha = 1, beta = 2.
    Bpsk,
    /// SER constants alpha = 2, beta = 1.
    Qpsk,
}

/// Monte Carlo vs. analytic downlink-SINR experiments for matched-filter
/// beamforming.
///
/// Configure a run either with a figure preset (`--preset fig1` .. `fig6`)
/// or explicitly with `--n-antennas`, `--n-users`, and `--snr-db`. Each run
/// samples the exact SINR, builds a kernel density estimate, evaluates the
/// analytic density, and writes `<label>_analytic`, `<label>_empirical`, and
/// `<label>_summary.json` into the output directory.
#[derive(Debug, Parser)]
#[command(name = "mimo-sinr", version)]
struct Cli {
    /// Base-station antenna count N.
    #[arg(long, value_name = "N", conflicts_with = "preset")]
    n_antennas: Option<usize>,

    /// Number of served single-antenna users K (at least 2).
    #[arg(long, value_name = "K", conflicts_with = "preset")]
    n_users: Option<usize>,

    /// Transmit SNR rho^2/sigma_n^2 in dB; sigma_n^2 is fixed to 1.
    #[arg(long, value_name = "DB", conflicts_with = "preset")]
    snr_db: Option<f64>,

    /// Per-entry channel variance (the SINR law does not depend on it).
    #[arg(long, value_name = "VAR", conflicts_with = "preset")]
    sigma_h_sq: Option<f64>,

    /// Monte Carlo sample count.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,

    /// Seed for the deterministic sampler.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Lower edge of the analytic evaluation grid (with --gamma-max).
    #[arg(long, value_name = "GAMMA", requires = "gamma_max")]
    gamma_min: Option<f64>,

    /// Upper edge of the analytic evaluation grid (with --gamma-min).
    #[arg(long, value_name = "GAMMA", requires = "gamma_min")]
    gamma_max: Option<f64>,

    /// Points in the analytic evaluation grid.
    #[arg(long, value_name = "COUNT", default_value_t = DEFAULT_GRID_POINTS)]
    gamma_points: usize,

    /// Figure preset to reproduce (fig1 .. fig6; see --list-presets).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Directory the artifacts are written into (created if missing).
    #[arg(long, value_name = "DIR", default_value = "out")]
    out_dir: PathBuf,

    /// On-disk format of the curve artifacts.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Modulation constants used for the average SER.
    #[arg(long, value_enum, default_value_t = ModulationArg::Bpsk)]
    modulation: ModulationArg,

    /// Print the preset table and exit.
    #[arg(long)]
    list_presets: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn run_cli(cli: Cli) -> Result<()> {
    init_thread_pool_from_env()?;

    if cli.list_presets {
        print_presets();
        return Ok(());
    }

    let grid = match (cli.gamma_min, cli.gamma_max) {
        (None, None) => None,
        (Some(lo), Some(hi)) => Some(GridSpec::new(lo, hi, cli.gamma_points)?),
        _ => unreachable!("clap enforces that the grid edges come together"),
    };

    for (config, label) in configured_runs(&cli)? {
        let mut spec = ExperimentSpec::new(config);
        spec.samples = cli.samples;
        spec.seed = cli.seed;
        spec.grid = grid.clone();
        spec.modulation = match cli.modulation {
            ModulationArg::Bpsk => ModulationParams::bpsk(),
            ModulationArg::Qpsk => ModulationParams::qpsk(),
        };
        spec.format = match cli.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
        spec.label = label;
        let report = experiment::run(&spec, &cli.out_dir)?;
        print_run_line(&spec, &report);
    }
    Ok(())
}

fn configured_runs(cli: &Cli) -> Result<Vec<(SystemConfig, String)>> {
    if let Some(preset) = &cli.preset {
        return preset_runs(preset);
    }
    let (n, k, snr) = match (cli.n_antennas, cli.n_users, cli.snr_db) {
        (Some(n), Some(k), Some(snr)) => (n, k, snr),
        _ => {
            return Err(Error::InvalidArgument(
                "without --preset, all of --n-antennas, --n-users, and --snr-db are required"
                    .into(),
            ))
        }
    };
    let rho = 10f64.powf(snr / 20.0);
    let config = SystemConfig::new(n, k, rho, cli.sigma_h_sq.unwrap_or(1.0), 1.0)?;
    let label = experiment::default_label(&config);
    Ok(vec![(config, label)])
}

fn print_presets() {
    println!("{:<8}{:<18}{:<6}SNR (dB)", "preset", "N", "K");
    for p in list_presets() {
        println!("{:<8}{:<18}{:<6}{}", p.name, p.n_antennas, p.n_users, p.snr_db);
    }
}

fn print_run_line(spec: &ExperimentSpec, report: &ExperimentReport) {
    let s = &report.summary;
    println!(
        "[{}] l1={} ser={} sum_rate={} normalization={} ({} files, {:.1}s)",
        spec.label,
        fmt_opt(s.l1),
        fmt_opt(s.ser.map(|e| e.value)),
        fmt_opt(s.sum_rate.map(|e| e.value)),
        fmt_opt(s.normalization_check),
        report.files.len(),
        s.runtime_s,
    );
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => "n/a".to_owned(),
    }
}
