//! Scalar special functions and the log-domain densities of the three
//! building-block random variables: the scaled signal power `x`, the
//! aggregate interference `z`, and the inverted signal term `t = sigma_n^2/x`.
//!
//! Every density is exposed in the log domain. Shape parameters reach a few
//! hundred in the regimes of interest, where linear-domain gamma factors
//! overflow long before the densities themselves become extreme.

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// A probability density value stored as its natural logarithm.
///
/// `f64::NEG_INFINITY` encodes an exact zero density. The wrapped value is
/// never NaN.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogDensity(f64);

impl LogDensity {
    /// Log-density of an impossible outcome (density zero).
    pub const ZERO: LogDensity = LogDensity(f64::NEG_INFINITY);

    /// Wraps a log-density value. NaN is rejected because every density in
    /// this crate is defined (possibly zero) on the whole real line.
    pub fn new(log_value: f64) -> Result<Self> {
        if log_value.is_nan() {
            return Err(Error::domain("log-density must not be NaN"));
        }
        Ok(LogDensity(log_value))
    }

    /// The natural logarithm of the density.
    pub fn log(&self) -> f64 {
        self.0
    }

    /// The density in linear scale. May underflow to 0 or overflow to
    /// infinity; the log form is the lossless representation.
    pub fn value(&self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    fn from_finite(log_value: f64) -> Self {
        debug_assert!(!log_value.is_nan());
        LogDensity(log_value)
    }
}

/// Natural log of the gamma function for positive real arguments.
///
/// Relative accuracy is better than 1e-13 across `[1, 300]`, the range of
/// shape parameters reachable through [`SystemConfig`].
pub fn log_gamma(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(format!(
            "log_gamma requires a positive argument, got {a}"
        )));
    }
    Ok(ln_gamma(a))
}

/// Lanczos approximation (g = 7, 9 terms), valid for positive arguments.
pub(crate) fn ln_gamma(a: f64) -> f64 {
    debug_assert!(a > 0.0);
    const G: f64 = 7.0;
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    const HALF_LOG_TWO_PI: f64 = 0.918_938_533_204_672_7;

    if a < 0.5 {
        // Reflection keeps the direct series out of its ill-conditioned zone.
        let pi = std::f64::consts::PI;
        return (pi / (pi * a).sin()).ln() - ln_gamma(1.0 - a);
    }

    let z = a - 1.0;
    let mut series = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    HALF_LOG_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`, evaluated through the
/// complementary error function to stay accurate deep into the tail.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Log-density of the signal power `x`, distributed as
/// `signal_scale * ChiSquared(2 * n_antennas)`.
pub fn log_f_x(x: f64, config: &SystemConfig) -> LogDensity {
    let n = config.n_antennas() as f64;
    log_scaled_chi_squared(x, n, config.signal_scale())
}

/// Log-density of the aggregate interference `z`, modeled as
/// `interference_scale * ChiSquared(2 * (n_users - 1))`.
pub fn log_f_z(z: f64, config: &SystemConfig) -> LogDensity {
    let shape = (config.n_users() - 1) as f64;
    log_scaled_chi_squared(z, shape, config.interference_scale())
}

/// Log-density of `t = sigma_n^2 / x`, the inverse-gamma image of the signal
/// power under the noise normalization.
pub fn log_f_t(t: f64, config: &SystemConfig) -> LogDensity {
    if !(t > 0.0) || t == f64::INFINITY {
        return LogDensity::ZERO;
    }
    let n = config.n_antennas() as f64;
    let theta = 2.0 * config.signal_scale();
    let s = config.sigma_n_sq();
    // t = s/x with x ~ Gamma(n, theta):
    // f_t(t) = s^n / (theta^n Gamma(n)) t^{-(n+1)} exp(-s/(theta t)).
    let log = n * s.ln() - (n + 1.0) * t.ln() - s / (theta * t) - n * theta.ln() - ln_gamma(n);
    LogDensity::from_finite(log)
}

/// Log-density of `scale * ChiSquared(2 * shape)`, i.e. a gamma density with
/// the given shape and scale parameter `2 * scale`.
fn log_scaled_chi_squared(v: f64, shape: f64, scale: f64) -> LogDensity {
    if !(v > 0.0) || v == f64::INFINITY {
        return LogDensity::ZERO;
    }
    let theta = 2.0 * scale;
    // Skip the power term when the shape is 1: `0 * ln(v)` would poison the
    // result with NaN as v -> 0 underflows.
    let power = if shape == 1.0 { 0.0 } else { (shape - 1.0) * v.ln() };
    let log = power - v / theta - shape * theta.ln() - ln_gamma(shape);
    LogDensity::from_finite(log)
}
