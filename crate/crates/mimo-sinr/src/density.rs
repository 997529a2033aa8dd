//! The approximate closed-form density of the downlink SINR and its
//! supporting machinery: evaluation grids, density curves, mode and tail
//! location, and the normalization check.
//!
//! The density is a single integral with an essential singularity at the
//! origin of the integration variable:
//!
//! ```text
//! f(g) = C(g) * Int_0^{1/g} (1/g - v)^(K-2) exp(N v - c/v) v^-(N+1) dv,
//! c = N sigma_n^2 / rho^2,
//! C(g) = sigma_n^(2N) exp(-N/g) N^(K+N-1) / (rho^(2N) Gamma(N) Gamma(K-1) g^2).
//! ```
//!
//! Both the prefactor and the integrand span thousands of e-foldings across
//! the configurations of interest, so every evaluation runs in the log
//! domain end to end.

use std::cell::RefCell;
use std::io::Write;

use rayon::prelude::*;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_log, QuadEstimate, QuadratureSettings, ScaledIntegral};
use crate::special::{self, ln_gamma};

/// Density threshold defining where the upper tail is truncated for metric
/// integrals: the default cutoff is the first doubling of the mode at which
/// the density falls below this value.
const TAIL_DENSITY_FLOOR_LOG: f64 = -32.236_191_301_916_64; // ln(1e-14)

/// An evaluation grid over SINR values.
#[derive(Debug, Clone)]
pub struct GridSpec {
    gamma_min: f64,
    gamma_max: f64,
    points: usize,
    log_spaced: bool,
}

impl GridSpec {
    /// A uniformly spaced grid on `[gamma_min, gamma_max]`.
    pub fn new(gamma_min: f64, gamma_max: f64, points: usize) -> Result<Self> {
        GridSpec::build(gamma_min, gamma_max, points, false)
    }

    /// A geometrically spaced grid on `[gamma_min, gamma_max]`.
    pub fn log_spaced(gamma_min: f64, gamma_max: f64, points: usize) -> Result<Self> {
        GridSpec::build(gamma_min, gamma_max, points, true)
    }

    fn build(gamma_min: f64, gamma_max: f64, points: usize, log_spaced: bool) -> Result<Self> {
        if !(gamma_min > 0.0 && gamma_min.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma_min must be finite and positive, got {gamma_min}"
            )));
        }
        if !(gamma_max > gamma_min && gamma_max.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma_max must be finite and greater than gamma_min, got {gamma_max}"
            )));
        }
        if points < 2 {
            return Err(Error::invalid("grid needs at least 2 points"));
        }
        Ok(GridSpec {
            gamma_min,
            gamma_max,
            points,
            log_spaced,
        })
    }

    pub fn gamma_min(&self) -> f64 {
        self.gamma_min
    }

    pub fn gamma_max(&self) -> f64 {
        self.gamma_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn is_log_spaced(&self) -> bool {
        self.log_spaced
    }

    /// Materializes the grid. The first and last values are exactly
    /// `gamma_min` and `gamma_max`.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let mut out = Vec::with_capacity(n);
        if self.log_spaced {
            let la = self.gamma_min.ln();
            let lb = self.gamma_max.ln();
            for i in 0..n {
                let t = i as f64 / (n - 1) as f64;
                out.push((la + t * (lb - la)).exp());
            }
        } else {
            for i in 0..n {
                let t = i as f64 / (n - 1) as f64;
                out.push(self.gamma_min + t * (self.gamma_max - self.gamma_min));
            }
        }
        out[0] = self.gamma_min;
        out[n - 1] = self.gamma_max;
        out
    }
}

/// Whether a curve came from the analytic density or from sampled data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Analytic,
    Empirical,
}

impl CurveKind {
    pub fn label(&self) -> &'static str {
        match self {
            CurveKind::Analytic => "analytic",
            CurveKind::Empirical => "empirical",
        }
    }
}

/// A density sampled on a finite grid, tagged with its provenance.
#[derive(Debug, Clone)]
pub struct DensityCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
    kind: CurveKind,
    config: SystemConfig,
}

impl DensityCurve {
    pub fn new(
        grid: Vec<f64>,
        values: Vec<f64>,
        kind: CurveKind,
        config: SystemConfig,
    ) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid(format!(
                "grid has {} points but values has {}",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::invalid("a density curve needs at least 2 points"));
        }
        if !grid[0].is_finite() || grid[0] <= 0.0 {
            return Err(Error::invalid("grid values must be positive and finite"));
        }
        for w in grid.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::invalid("grid must be strictly increasing"));
            }
        }
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "density values must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(DensityCurve {
            grid,
            values,
            kind,
            config,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Trapezoid-rule mass of the curve over its grid.
    pub fn trapezoid_mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.values[i] + self.values[i - 1]) * (self.grid[i] - self.grid[i - 1]);
        }
        acc
    }

    /// The grid point carrying the largest density value (first on ties).
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for i in 1..self.values.len() {
            if self.values[i] > self.values[best] {
                best = i;
            }
        }
        self.grid[best]
    }

    /// Linear interpolation; zero outside the grid range.
    pub fn interpolate(&self, x: f64) -> f64 {
        if x < self.grid[0] || x > *self.grid.last().unwrap() {
            return 0.0;
        }
        let i = self.grid.partition_point(|&g| g < x);
        if i == 0 {
            return self.values[0];
        }
        let (x0, x1) = (self.grid[i - 1], self.grid[i.min(self.grid.len() - 1)]);
        if i == self.grid.len() || x == x0 {
            return self.values[i - 1];
        }
        let t = (x - x0) / (x1 - x0);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }

    /// A copy with every grid point below `lo` dropped.
    pub fn clipped_below(&self, lo: f64) -> Result<DensityCurve> {
        let start = self.grid.partition_point(|&g| g < lo);
        if self.grid.len() - start < 2 {
            return Err(Error::invalid(format!(
                "clipping at {lo} leaves fewer than 2 grid points"
            )));
        }
        DensityCurve::new(
            self.grid[start..].to_vec(),
            self.values[start..].to_vec(),
            self.kind,
            self.config,
        )
    }

    /// Writes `gamma,density,kind` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::with_capacity(self.grid.len() * 52 + 24);
        buf.push_str("gamma,density,kind\n");
        let label = self.kind.label();
        for (g, v) in self.grid.iter().zip(&self.values) {
            buf.push_str(&format!("{g:.16e},{v:.16e},{label}\n"));
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }
}

/// Runs a log-domain integration whose integrand can fail, propagating the
/// first integrand error instead of the integral.
pub(crate) fn integrate_fallible<F>(
    log_f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<ScaledIntegral>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let wrapped = |x: f64| {
        if failure.borrow().is_some() {
            return f64::NEG_INFINITY;
        }
        match log_f(x) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                f64::NEG_INFINITY
            }
        }
    };
    let r = integrate_log(wrapped, a, b, settings);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// A log-domain density evaluation: `log_value` plus the quadrature error
/// carried as a log-scaled absolute error.
struct LogEval {
    log_value: f64,
    log_abs_error: f64,
}

impl LogEval {
    const ZERO: LogEval = LogEval {
        log_value: f64::NEG_INFINITY,
        log_abs_error: f64::NEG_INFINITY,
    };
}

/// Shared core of the direct density route: validates `gamma`, assembles the
/// log prefactor, and integrates the singular kernel over `(0, 1/gamma)`.
fn f_gamma_core(
    gamma: f64,
    config: &SystemConfig,
    settings: &QuadratureSettings,
) -> Result<LogEval> {
    if gamma.is_nan() {
        return Err(Error::invalid("gamma must not be NaN"));
    }
    if gamma <= 0.0 || gamma == f64::INFINITY {
        return Ok(LogEval::ZERO);
    }
    let inv = 1.0 / gamma;
    if !inv.is_finite() {
        // gamma is subnormal; the density underflows irrecoverably there.
        return Ok(LogEval::ZERO);
    }

    let n = config.n_antennas() as f64;
    let k = config.n_users() as f64;
    let c = n * config.sigma_n_sq() / config.rho_sq();
    let km2 = k - 2.0;

    let log_prefactor = n * config.sigma_n_sq().ln() - n * inv + (k + n - 1.0) * n.ln()
        - n * config.rho_sq().ln()
        - ln_gamma(n)
        - ln_gamma(k - 1.0)
        - 2.0 * gamma.ln();

    // The prefactor is folded into the integrand rather than applied after
    // integration: the tolerances then constrain the density itself, not the
    // bare integral, which the prefactor can amplify by hundreds of
    // e-foldings.
    let log_integrand = move |nu: f64| {
        if nu <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let diff = inv - nu;
        // K = 2 drops the power factor entirely; evaluating it as
        // 0 * ln(diff) would turn the right endpoint into NaN.
        let power = if km2 == 0.0 {
            0.0
        } else if diff > 0.0 {
            km2 * diff.ln()
        } else {
            return f64::NEG_INFINITY;
        };
        log_prefactor + power + n * nu - c / nu - (n + 1.0) * nu.ln()
    };

    let r = integrate_log(log_integrand, 0.0, inv, settings);
    if !r.converged {
        return Err(convergence_error(format!("f_gamma at gamma = {gamma}"), &r));
    }
    Ok(LogEval {
        log_value: r.log_value(),
        log_abs_error: if r.abs_error > 0.0 {
            r.log_scale + r.abs_error.ln()
        } else {
            f64::NEG_INFINITY
        },
    })
}

fn convergence_error(context: String, r: &ScaledIntegral) -> Error {
    let error_estimate = if r.abs_error > 0.0 {
        (r.log_scale + r.abs_error.ln()).exp()
    } else {
        0.0
    };
    Error::Convergence {
        context,
        partial: r.log_value().exp(),
        error_estimate,
        subdivisions: r.subdivisions,
    }
}

/// Natural log of the approximate SINR density. Returns negative infinity
/// for any `gamma` outside the support `(0, inf)`.
pub fn log_f_gamma(
    gamma: f64,
    config: &SystemConfig,
    settings: &QuadratureSettings,
) -> Result<f64> {
    Ok(f_gamma_core(gamma, config, settings)?.log_value)
}

/// The approximate SINR density in linear scale. Zero for `gamma <= 0`.
pub fn f_gamma(gamma: f64, config: &SystemConfig, settings: &QuadratureSettings) -> Result<f64> {
    Ok(log_f_gamma(gamma, config, settings)?.exp())
}

/// [`f_gamma`] together with the propagated quadrature error estimate.
pub fn f_gamma_with_error(
    gamma: f64,
    config: &SystemConfig,
    settings: &QuadratureSettings,
) -> Result<QuadEstimate> {
    let eval = f_gamma_core(gamma, config, settings)?;
    Ok(QuadEstimate {
        value: eval.log_value.exp(),
        abs_error: eval.log_abs_error.exp(),
    })
}

/// Natural log of the density of `w = t + z`, the convolution of the
/// inverted-signal and interference densities. Support is `(0, inf)`.
pub fn log_f_w(w: f64, config: &SystemConfig, settings: &QuadratureSettings) -> Result<f64> {
    if w.is_nan() {
        return Err(Error::invalid("w must not be NaN"));
    }
    if w <= 0.0 || w == f64::INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let log_integrand =
        move |z: f64| special::log_f_z(z, config).log() + special::log_f_t(w - z, config).log();
    let r = integrate_log(log_integrand, 0.0, w, settings);
    if !r.converged {
        return Err(convergence_error(format!("f_w at w = {w}"), &r));
    }
    Ok(r.log_value())
}

/// The convolution density of `w = t + z` in linear scale.
pub fn f_w(w: f64, config: &SystemConfig, settings: &QuadratureSettings) -> Result<f64> {
    Ok(log_f_w(w, config, settings)?.exp())
}

/// The SINR density reassembled through the `gamma = 1/w` change of
/// variables: `f(gamma) = f_w(1/gamma) / gamma^2`. Mathematically identical
/// to [`f_gamma`]; evaluated through an independent code path as a
/// cross-check.
pub fn f_gamma_convolution(
    gamma: f64,
    config: &SystemConfig,
    settings: &QuadratureSettings,
) -> Result<f64> {
    if gamma.is_nan() {
        return Err(Error::invalid("gamma must not be NaN"));
    }
    if gamma <= 0.0 || gamma == f64::INFINITY || !(1.0 / gamma).is_finite() {
        return Ok(0.0);
    }
    let w = 1.0 / gamma;
    // As in the direct route, the Jacobian 1/gamma^2 rides along inside the
    // integrand so the tolerances see the final density.
    let log_jacobian = -2.0 * gamma.ln();
    let log_integrand = move |z: f64| {
        log_jacobian + special::log_f_z(z, config).log() + special::log_f_t(w - z, config).log()
    };
    let r = integrate_log(log_integrand, 0.0, w, settings);
    if !r.converged {
        return Err(convergence_error(
            format!("f_gamma (convolution route) at gamma = {gamma}"),
            &r,
        ));
    }
    Ok(r.log_value().exp())
}

/// Evaluates the analytic density over a grid.
pub fn f_gamma_curve(
    config: &SystemConfig,
    grid: &GridSpec,
    settings: &QuadratureSettings,
) -> Result<DensityCurve> {
    Ok(f_gamma_curve_with_error(config, grid, settings)?.0)
}

/// Evaluates the analytic density over a grid, also returning the largest
/// per-point quadrature error estimate.
pub fn f_gamma_curve_with_error(
    config: &SystemConfig,
    grid: &GridSpec,
    settings: &QuadratureSettings,
) -> Result<(DensityCurve, f64)> {
    let xs = grid.values();
    let evals: Result<Vec<QuadEstimate>> = xs
        .par_iter()
        .map(|&g| {
            f_gamma_with_error(g, config, settings).map_err(|e| annotate_grid_point(e, g))
        })
        .collect();
    let evals = evals?;
    let max_err = evals.iter().fold(0.0f64, |m, e| m.max(e.abs_error));
    let values = evals.into_iter().map(|e| e.value).collect();
    let curve = DensityCurve::new(xs, values, CurveKind::Analytic, *config)?;
    Ok((curve, max_err))
}

fn annotate_grid_point(e: Error, gamma: f64) -> Error {
    match e {
        Error::Convergence {
            context,
            partial,
            error_estimate,
            subdivisions,
        } => Error::Convergence {
            context: format!("{context} (grid point gamma = {gamma})"),
            partial,
            error_estimate,
            subdivisions,
        },
        other => other,
    }
}

/// Scale of a typical SINR value: the ratio of the mean signal power to the
/// mean of `sigma_n^2 +` mean interference power.
fn typical_gamma(config: &SystemConfig) -> f64 {
    let n = config.n_antennas() as f64;
    let k = config.n_users() as f64;
    1.0 / (config.sigma_n_sq() / config.rho_sq() + (k - 1.0) / n)
}

/// Locates the mode of the analytic density by a coarse geometric scan
/// around the typical SINR followed by golden-section refinement in
/// log-gamma.
pub fn density_mode(config: &SystemConfig, settings: &QuadratureSettings) -> Result<f64> {
    let g_typ = typical_gamma(config);
    let mut best_j = 0i32;
    let mut best = f64::NEG_INFINITY;
    for j in -20..=6 {
        let g = g_typ * 2f64.powi(j);
        let v = log_f_gamma(g, config, settings)?;
        if v > best {
            best = v;
            best_j = j;
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::domain(
            "density vanished everywhere in the mode scan range",
        ));
    }
    let mut lo = (g_typ * 2f64.powi(best_j - 1)).ln();
    let mut hi = (g_typ * 2f64.powi(best_j + 1)).ln();
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = log_f_gamma(x1.exp(), config, settings)?;
    let mut f2 = log_f_gamma(x2.exp(), config, settings)?;
    for _ in 0..48 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = log_f_gamma(x2.exp(), config, settings)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = log_f_gamma(x1.exp(), config, settings)?;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Upper truncation point for metric integrals over the density tail.
///
/// Honors an explicit `tail_cutoff` override in the settings; otherwise
/// doubles from the mode until the density falls below 1e-14.
pub fn tail_cutoff(config: &SystemConfig, settings: &QuadratureSettings) -> Result<f64> {
    if let Some(c) = settings.tail_cutoff() {
        return Ok(c);
    }
    let mut c = density_mode(config, settings)?;
    for _ in 0..200 {
        c *= 2.0;
        if log_f_gamma(c, config, settings)? < TAIL_DENSITY_FLOOR_LOG {
            return Ok(c);
        }
    }
    Err(Error::domain(
        "tail cutoff search did not terminate within 200 doublings of the mode",
    ))
}

/// Adaptive integral of the analytic density over `(0, tail_cutoff)`. For a
/// valid density this is 1 up to the truncated tail mass and quadrature
/// error.
pub fn normalization(config: &SystemConfig, settings: &QuadratureSettings) -> Result<QuadEstimate> {
    let cutoff = tail_cutoff(config, settings)?;
    let r = integrate_fallible(
        |g| log_f_gamma(g, config, settings),
        0.0,
        cutoff,
        settings,
    )?;
    r.into_estimate("normalization of f_gamma")
}
