//! Experiment orchestration behind the `mimo-sinr` binary and the runnable
//! examples: Monte Carlo sampling, KDE, analytic density evaluation,
//! curve distances, sample moments, and link metrics, written out as
//! machine-readable artifacts plus a summary JSON.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::channel::{sample_sinr_batch, SinrSampleSet};
use crate::config::SystemConfig;
use crate::density::{f_gamma_curve_with_error, normalization, DensityCurve, GridSpec};
use crate::error::{Error, Result};
use crate::kde::{kde, KdeSettings};
use crate::metrics::{avg_ser, avg_sum_rate, ModulationParams};
use crate::quadrature::{QuadEstimate, QuadratureSettings};
use crate::stats::{compare, moment_summary, quantile, MomentSummary};

/// Default Monte Carlo sample count, matching the figure protocol.
pub const DEFAULT_SAMPLES: usize = 1_000_000;

/// Default number of points in a derived evaluation grid.
pub const DEFAULT_GRID_POINTS: usize = 512;

/// The artifacts and summary entries an experiment produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Outputs {
    pub analytic_curve: bool,
    pub empirical_curve: bool,
    pub distance: bool,
    pub moments: bool,
    pub ser: bool,
    pub sum_rate: bool,
}

impl Outputs {
    pub fn all() -> Self {
        Outputs {
            analytic_curve: true,
            empirical_curve: true,
            distance: true,
            moments: true,
            ser: true,
            sum_rate: true,
        }
    }

    pub fn none() -> Self {
        Outputs {
            analytic_curve: false,
            empirical_curve: false,
            distance: false,
            moments: false,
            ser: false,
            sum_rate: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.analytic_curve
            || self.empirical_curve
            || self.distance
            || self.moments
            || self.ser
            || self.sum_rate)
    }

    /// Sampling is needed for anything empirical, and for the analytic curve
    /// when its grid must be derived from sample quantiles.
    fn needs_samples(&self, grid_given: bool) -> bool {
        self.empirical_curve
            || self.distance
            || self.moments
            || (self.analytic_curve && !grid_given)
    }

    fn needs_quadrature(&self) -> bool {
        self.analytic_curve || self.distance || self.ser || self.sum_rate
    }
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs::all()
    }
}

/// On-disk encoding of the curve artifacts. The summary is always JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// A complete description of one experiment run.
///
/// When `grid` is `None` the evaluation grid is derived from the run's own
/// samples: uniform over the [0.1%, 99.9%] sample quantile range with
/// [`DEFAULT_GRID_POINTS`] points.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub config: SystemConfig,
    pub samples: usize,
    pub seed: u64,
    pub grid: Option<GridSpec>,
    pub kde: KdeSettings,
    pub quadrature: QuadratureSettings,
    pub outputs: Outputs,
    pub modulation: ModulationParams,
    pub format: OutputFormat,
    /// Prefix for the artifact filenames; must be filename-safe.
    pub label: String,
}

impl ExperimentSpec {
    /// A spec with the figure-protocol defaults: 10^6 samples, seed 1, all
    /// outputs, BPSK-style SER constants, CSV curves.
    pub fn new(config: SystemConfig) -> Self {
        ExperimentSpec {
            config,
            samples: DEFAULT_SAMPLES,
            seed: 1,
            grid: None,
            kde: KdeSettings::default(),
            quadrature: QuadratureSettings::default(),
            outputs: Outputs::all(),
            modulation: ModulationParams::bpsk(),
            format: OutputFormat::Csv,
            label: default_label(&config),
        }
    }
}

/// `n16_k8_snr10db`-style label derived from a configuration.
pub fn default_label(config: &SystemConfig) -> String {
    format!(
        "n{}_k{}_snr{}db",
        config.n_antennas(),
        config.n_users(),
        trim_number(config.snr_db())
    )
}

fn trim_number(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

/// The summary document written next to the curve artifacts. Every field is
/// always present; entries whose output was not requested are `null`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: SystemConfig,
    pub seed: u64,
    pub l1: Option<f64>,
    pub sup: Option<f64>,
    pub moments: Option<MomentSummary>,
    pub ser: Option<QuadEstimate>,
    pub sum_rate: Option<QuadEstimate>,
    /// Adaptive-quadrature value of the total mass of the analytic density;
    /// should sit within a fraction of a percent of 1.
    pub normalization_check: Option<f64>,
    /// Largest absolute error estimate over every quadrature in the run.
    pub quadrature_max_error: Option<f64>,
    pub runtime_s: f64,
}

/// What [`run`] hands back: the summary, the paths it wrote, and the curves
/// themselves for further in-process use.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub summary: Summary,
    pub files: Vec<PathBuf>,
    pub analytic: Option<DensityCurve>,
    pub empirical: Option<DensityCurve>,
}

/// Runs one experiment and writes its artifacts into `out_dir` (created if
/// missing): `{label}_analytic.{csv,json}` and `{label}_empirical.{csv,json}`
/// when requested, and `{label}_summary.json` always.
///
/// Curve distances are measured with both curves clipped below the 0.1%
/// sample quantile, where the Gaussian kernel bleeds mass past the support
/// edge and a comparison would be biased.
pub fn run(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentReport> {
    if spec.outputs.is_empty() {
        return Err(Error::invalid("experiment requests no outputs"));
    }
    if spec.samples == 0 {
        return Err(Error::invalid("sample count must be positive"));
    }
    validate_label(&spec.label)?;

    let started = Instant::now();
    let outputs = spec.outputs;
    let mut quad_errors: Vec<f64> = Vec::new();

    let sample_set = if outputs.needs_samples(spec.grid.is_some()) {
        Some(sample_sinr_batch(&spec.config, spec.samples, spec.seed)?)
    } else {
        None
    };
    let clip_lo = match &sample_set {
        Some(s) => Some(quantile(s.samples(), 0.001)?),
        None => None,
    };

    let grid = match (&spec.grid, &sample_set) {
        (Some(g), _) => Some(g.clone()),
        (None, Some(s)) => Some(default_grid(s)?),
        (None, None) => None,
    };

    let analytic = if outputs.analytic_curve || outputs.distance {
        let g = grid
            .as_ref()
            .ok_or_else(|| Error::invalid("no grid available for the analytic curve"))?;
        let (curve, max_err) = f_gamma_curve_with_error(&spec.config, g, &spec.quadrature)?;
        quad_errors.push(max_err);
        Some(curve)
    } else {
        None
    };

    let empirical = if outputs.empirical_curve || outputs.distance {
        let s = sample_set
            .as_ref()
            .expect("sample set present when empirical outputs are requested");
        Some(kde(s, &spec.kde)?)
    } else {
        None
    };

    let distance = if outputs.distance {
        let lo = clip_lo.expect("clip quantile present when distance is requested");
        let a = analytic
            .as_ref()
            .expect("analytic curve present when distance is requested")
            .clipped_below(lo)?;
        let e = empirical
            .as_ref()
            .expect("empirical curve present when distance is requested")
            .clipped_below(lo)?;
        Some(compare(&a, &e)?)
    } else {
        None
    };

    let moments = match &sample_set {
        Some(s) if outputs.moments => Some(moment_summary(s)?),
        _ => None,
    };

    let ser = if outputs.ser {
        let est = avg_ser(&spec.config, &spec.modulation, &spec.quadrature)?;
        quad_errors.push(est.abs_error);
        Some(est)
    } else {
        None
    };

    let sum_rate = if outputs.sum_rate {
        let est = avg_sum_rate(&spec.config, &spec.quadrature)?;
        quad_errors.push(est.abs_error);
        Some(est)
    } else {
        None
    };

    let normalization_check = if outputs.needs_quadrature() {
        let est = normalization(&spec.config, &spec.quadrature)?;
        quad_errors.push(est.abs_error);
        Some(est.value)
    } else {
        None
    };

    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    if outputs.analytic_curve {
        let curve = analytic.as_ref().expect("analytic curve was computed");
        files.push(write_curve(curve, out_dir, &spec.label, spec.format)?);
    }
    if outputs.empirical_curve {
        let curve = empirical.as_ref().expect("empirical curve was computed");
        files.push(write_curve(curve, out_dir, &spec.label, spec.format)?);
    }

    let summary = Summary {
        config: spec.config,
        seed: spec.seed,
        l1: distance.map(|d| d.l1),
        sup: distance.map(|d| d.sup),
        moments,
        ser,
        sum_rate,
        normalization_check,
        quadrature_max_error: quad_errors
            .iter()
            .copied()
            .reduce(f64::max),
        runtime_s: started.elapsed().as_secs_f64(),
    };

    let summary_path = out_dir.join(format!("{}_summary.json", spec.label));
    let mut text = serde_json::to_string_pretty(&summary).map_err(json_error)?;
    text.push('\n');
    fs::write(&summary_path, text)?;
    files.push(summary_path);

    Ok(ExperimentReport {
        summary,
        files,
        analytic,
        empirical,
    })
}

fn validate_label(label: &str) -> Result<()> {
    let safe = !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !label.starts_with('.');
    if safe {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "label {label:?} is not filename-safe (use letters, digits, '_', '-', '.')"
        )))
    }
}

/// Uniform grid over the [0.1%, 99.9%] sample quantile range.
fn default_grid(samples: &SinrSampleSet) -> Result<GridSpec> {
    let lo = quantile(samples.samples(), 0.001)?;
    let hi = quantile(samples.samples(), 0.999)?;
    GridSpec::new(lo, hi, DEFAULT_GRID_POINTS)
}

fn write_curve(
    curve: &DensityCurve,
    out_dir: &Path,
    label: &str,
    format: OutputFormat,
) -> Result<PathBuf> {
    let stem = format!("{label}_{}", curve.kind().label());
    let path = out_dir.join(format!("{stem}.{}", format.extension()));
    match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            curve.write_csv(&mut buf)?;
            fs::write(&path, buf)?;
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct CurveDoc<'a> {
                kind: &'a str,
                gamma: &'a [f64],
                density: &'a [f64],
            }
            let doc = CurveDoc {
                kind: curve.kind().label(),
                gamma: curve.grid(),
                density: curve.values(),
            };
            let mut text = serde_json::to_string_pretty(&doc).map_err(json_error)?;
            text.push('\n');
            fs::write(&path, text)?;
        }
    }
    Ok(path)
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Io(e.into())
}

/// One row of the preset table.
#[derive(Debug, Clone, Copy)]
pub struct PresetInfo {
    pub name: &'static str,
    pub n_antennas: &'static str,
    pub n_users: &'static str,
    pub snr_db: &'static str,
}

const SNR_SWEEP: [f64; 3] = [0.0, 5.0, 10.0];
const N_SWEEP: [usize; 4] = [16, 32, 64, 128];

/// The six figure presets: three (N, K) pairs swept over SNR, and three SNR
/// points swept over N at K = 8.
pub fn list_presets() -> Vec<PresetInfo> {
    vec![
        PresetInfo {
            name: "fig1",
            n_antennas: "16",
            n_users: "8",
            snr_db: "0, 5, 10",
        },
        PresetInfo {
            name: "fig2",
            n_antennas: "32",
            n_users: "16",
            snr_db: "0, 5, 10",
        },
        PresetInfo {
            name: "fig3",
            n_antennas: "128",
            n_users: "64",
            snr_db: "0, 5, 10",
        },
        PresetInfo {
            name: "fig4",
            n_antennas: "16, 32, 64, 128",
            n_users: "8",
            snr_db: "0",
        },
        PresetInfo {
            name: "fig5",
            n_antennas: "16, 32, 64, 128",
            n_users: "8",
            snr_db: "5",
        },
        PresetInfo {
            name: "fig6",
            n_antennas: "16, 32, 64, 128",
            n_users: "8",
            snr_db: "10",
        },
    ]
}

/// Expands a preset name into the labelled configurations it covers.
pub fn preset_runs(name: &str) -> Result<Vec<(SystemConfig, String)>> {
    match name {
        "fig1" => snr_sweep_runs("fig1", 16, 8),
        "fig2" => snr_sweep_runs("fig2", 32, 16),
        "fig3" => snr_sweep_runs("fig3", 128, 64),
        "fig4" => n_sweep_runs("fig4", 8, 0.0),
        "fig5" => n_sweep_runs("fig5", 8, 5.0),
        "fig6" => n_sweep_runs("fig6", 8, 10.0),
        other => Err(Error::invalid(format!(
            "unknown preset {other:?}; run --list-presets for the available ones"
        ))),
    }
}

fn snr_sweep_runs(
    name: &str,
    n_antennas: usize,
    n_users: usize,
) -> Result<Vec<(SystemConfig, String)>> {
    SNR_SWEEP
        .iter()
        .map(|&snr| {
            let config = SystemConfig::from_snr_db(n_antennas, n_users, snr)?;
            Ok((config, format!("{name}_snr{}db", snr as i64)))
        })
        .collect()
}

fn n_sweep_runs(name: &str, n_users: usize, snr_db: f64) -> Result<Vec<(SystemConfig, String)>> {
    N_SWEEP
        .iter()
        .map(|&n| {
            let config = SystemConfig::from_snr_db(n, n_users, snr_db)?;
            Ok((config, format!("{name}_n{n}")))
        })
        .collect()
}

/// Builds the global worker pool honoring the `MIMO_SINR_THREADS` cap when
/// set. Call once at startup, before any parallel work.
pub fn init_thread_pool_from_env() -> Result<()> {
    let raw = match std::env::var("MIMO_SINR_THREADS") {
        Ok(v) => v,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(Error::invalid("MIMO_SINR_THREADS is not valid UTF-8"))
        }
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        Error::invalid(format!(
            "MIMO_SINR_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    if threads == 0 {
        return Err(Error::invalid("MIMO_SINR_THREADS must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::invalid(format!("failed to build worker pool: {e}")))
}

/// Process exit code for an error: 2 usage, 3 convergence, 4 I/O.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::InvalidArgument(_) | Error::Domain(_) => 2,
        Error::Convergence { .. } => 3,
        Error::Io(_) => 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn small_spec() -> ExperimentSpec {
        let config = SystemConfig::from_snr_db(8, 4, 5.0).unwrap();
        let mut spec = ExperimentSpec::new(config);
        spec.samples = 4000;
        spec.seed = 7;
        spec
    }

    #[test]
    fn outputs_emptiness() {
        assert!(Outputs::none().is_empty());
        assert!(!Outputs::all().is_empty());
        let mut one = Outputs::none();
        one.ser = true;
        assert!(!one.is_empty());
    }

    #[test]
    fn rejects_empty_outputs_and_zero_samples() {
        let dir = tempdir().unwrap();
        let mut spec = small_spec();
        spec.outputs = Outputs::none();
        assert!(matches!(
            run(&spec, dir.path()),
            Err(Error::InvalidArgument(_))
        ));

        let mut spec = small_spec();
        spec.samples = 0;
        let err = run(&spec, dir.path()).unwrap_err();
        assert!(err.to_string().contains("sample count"));
    }

    #[test]
    fn rejects_path_like_labels() {
        let dir = tempdir().unwrap();
        for bad in ["", "../up", "a/b", ".hidden"] {
            let mut spec = small_spec();
            spec.label = bad.to_owned();
            assert!(run(&spec, dir.path()).is_err(), "label {bad:?} accepted");
        }
    }

    #[test]
    fn writes_requested_artifacts_and_summary() {
        let dir = tempdir().unwrap();
        let spec = small_spec();
        let report = run(&spec, dir.path()).unwrap();

        let label = &spec.label;
        for name in [
            format!("{label}_analytic.csv"),
            format!("{label}_empirical.csv"),
            format!("{label}_summary.json"),
        ] {
            assert!(dir.path().join(&name).is_file(), "{name} missing");
        }
        assert_eq!(report.files.len(), 3);

        let text = fs::read_to_string(dir.path().join(format!("{label}_summary.json"))).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in [
            "config",
            "seed",
            "l1",
            "sup",
            "moments",
            "ser",
            "sum_rate",
            "normalization_check",
            "quadrature_max_error",
            "runtime_s",
        ] {
            assert!(doc.get(key).is_some(), "summary key {key} missing");
        }
        assert!(doc["l1"].as_f64().unwrap() >= 0.0);
        assert!((doc["normalization_check"].as_f64().unwrap() - 1.0).abs() < 0.01);
        assert!(doc["moments"].is_object());
        assert!(doc["ser"]["value"].as_f64().unwrap() > 0.0);
        assert!(doc["sum_rate"]["value"].as_f64().unwrap() > 0.0);
        assert!(doc["runtime_s"].as_f64().unwrap() >= 0.0);
        assert_eq!(doc["seed"].as_u64().unwrap(), 7);
        assert_eq!(doc["config"]["n_antennas"].as_u64().unwrap(), 8);
    }

    #[test]
    fn rerun_is_byte_identical() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let spec = small_spec();
        run(&spec, dir_a.path()).unwrap();
        run(&spec, dir_b.path()).unwrap();
        for suffix in ["analytic.csv", "empirical.csv"] {
            let name = format!("{}_{suffix}", spec.label);
            let a = fs::read(dir_a.path().join(&name)).unwrap();
            let b = fs::read(dir_b.path().join(&name)).unwrap();
            assert!(!a.is_empty());
            assert_eq!(a, b, "{name} differs between reruns");
        }
    }

    #[test]
    fn json_curves_round_trip() {
        let dir = tempdir().unwrap();
        let mut spec = small_spec();
        spec.format = OutputFormat::Json;
        let report = run(&spec, dir.path()).unwrap();

        let text =
            fs::read_to_string(dir.path().join(format!("{}_analytic.json", spec.label))).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["kind"].as_str().unwrap(), "analytic");
        let parsed: Vec<f64> = doc["density"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        let curve = report.analytic.as_ref().unwrap();
        assert_eq!(parsed, curve.values(), "JSON floats must round-trip exactly");
        assert_eq!(doc["gamma"].as_array().unwrap().len(), curve.len());
    }

    #[test]
    fn metric_only_run_skips_sampling_and_curves() {
        let dir = tempdir().unwrap();
        let mut spec = small_spec();
        spec.outputs = Outputs::none();
        spec.outputs.ser = true;
        let report = run(&spec, dir.path()).unwrap();

        assert!(report.analytic.is_none());
        assert!(report.empirical.is_none());
        assert_eq!(report.files.len(), 1, "only the summary should be written");
        let s = &report.summary;
        assert!(s.ser.is_some());
        assert!(s.l1.is_none() && s.sup.is_none());
        assert!(s.moments.is_none() && s.sum_rate.is_none());
        assert!(s.normalization_check.is_some());
    }

    #[test]
    fn explicit_grid_bounds_are_honored() {
        let dir = tempdir().unwrap();
        let mut spec = small_spec();
        spec.grid = Some(GridSpec::new(0.5, 4.0, 32).unwrap());
        spec.outputs = Outputs::none();
        spec.outputs.analytic_curve = true;
        let report = run(&spec, dir.path()).unwrap();
        let curve = report.analytic.unwrap();
        assert_eq!(curve.grid()[0], 0.5);
        assert_eq!(*curve.grid().last().unwrap(), 4.0);
        assert_eq!(curve.len(), 32);
    }

    #[test]
    fn derived_grid_spans_the_sample_quantiles() {
        let dir = tempdir().unwrap();
        let spec = small_spec();
        let report = run(&spec, dir.path()).unwrap();
        let samples = sample_sinr_batch(&spec.config, spec.samples, spec.seed).unwrap();
        let lo = quantile(samples.samples(), 0.001).unwrap();
        let hi = quantile(samples.samples(), 0.999).unwrap();
        let curve = report.analytic.unwrap();
        assert_eq!(curve.grid()[0], lo);
        assert_eq!(*curve.grid().last().unwrap(), hi);
        assert_eq!(curve.len(), DEFAULT_GRID_POINTS);
    }

    #[test]
    fn preset_table_and_expansion() {
        assert_eq!(list_presets().len(), 6);

        let fig2 = preset_runs("fig2").unwrap();
        assert_eq!(fig2.len(), 3);
        for (config, _) in &fig2 {
            assert_eq!(config.n_antennas(), 32);
            assert_eq!(config.n_users(), 16);
        }
        assert_eq!(fig2[1].1, "fig2_snr5db");
        assert!((fig2[2].0.snr_db() - 10.0).abs() < 1e-9);

        let fig6 = preset_runs("fig6").unwrap();
        assert_eq!(fig6.len(), 4);
        let ns: Vec<usize> = fig6.iter().map(|(c, _)| c.n_antennas()).collect();
        assert_eq!(ns, vec![16, 32, 64, 128]);
        for (config, label) in &fig6 {
            assert_eq!(config.n_users(), 8);
            assert!((config.snr_db() - 10.0).abs() < 1e-9);
            assert!(label.starts_with("fig6_n"));
        }

        assert!(preset_runs("fig7").is_err());
    }

    #[test]
    fn default_labels_are_tidy() {
        let c = SystemConfig::from_snr_db(16, 8, 10.0).unwrap();
        assert_eq!(default_label(&c), "n16_k8_snr10db");
        let c = SystemConfig::from_snr_db(16, 8, 2.5).unwrap();
        assert_eq!(default_label(&c), "n16_k8_snr2.5db");
        let c = SystemConfig::from_snr_db(16, 8, -3.0).unwrap();
        assert_eq!(default_label(&c), "n16_k8_snr-3db");
    }

    #[test]
    fn exit_codes_follow_the_convention() {
        assert_eq!(exit_code(&Error::invalid("x")), 2);
        assert_eq!(exit_code(&Error::domain("x")), 2);
        assert_eq!(
            exit_code(&Error::Convergence {
                context: "t".into(),
                partial: 0.0,
                error_estimate: 1.0,
                subdivisions: 3,
            }),
            3
        );
        assert_eq!(
            exit_code(&Error::Io(std::io::Error::other("disk fell off"))),
            4
        );
    }

    #[test]
    fn summary_validates_against_shipped_schema() {
        let schema_text = fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/schema/summary.schema.json"
        ))
        .unwrap();
        let schema: serde_json::Value = serde_json::from_str(&schema_text).unwrap();
        let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();

        let dir = tempdir().unwrap();
        let full = run(&small_spec(), dir.path()).unwrap();
        let mut metric_spec = small_spec();
        metric_spec.outputs = Outputs::none();
        metric_spec.outputs.moments = true;
        metric_spec.label = "metrics_only".into();
        let sparse = run(&metric_spec, dir.path()).unwrap();

        for report in [&full, &sparse] {
            let doc = serde_json::to_value(&report.summary).unwrap();
            let result = compiled.validate(&doc);
            if let Err(errors) = result {
                let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
                panic!("summary failed schema validation: {msgs:?}");
            }
        }
    }
}
