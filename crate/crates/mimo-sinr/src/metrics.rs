//! Link-level metrics averaged over the analytic SINR density: symbol error
//! rate and sum spectral efficiency.

use crate::config::SystemConfig;
use crate::density::{integrate_fallible, log_f_gamma, tail_cutoff};
use crate::error::{Error, Result};
use crate::quadrature::{QuadEstimate, QuadratureSettings};
use crate::special::q_function;

/// Modulation-dependent constants of the generic SER formula
/// `SER = alpha_tilde * E[Q(beta_tilde * gamma)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    alpha_tilde: f64,
    beta_tilde: f64,
}

impl ModulationParams {
    pub fn new(alpha_tilde: f64, beta_tilde: f64) -> Result<Self> {
        if !(alpha_tilde >= 0.0 && alpha_tilde.is_finite()) {
            return Err(Error::invalid(format!(
                "alpha_tilde must be finite and non-negative, got {alpha_tilde}"
            )));
        }
        if !(beta_tilde > 0.0 && beta_tilde.is_finite()) {
            return Err(Error::invalid(format!(
                "beta_tilde must be finite and positive, got {beta_tilde}"
            )));
        }
        Ok(ModulationParams {
            alpha_tilde,
            beta_tilde,
        })
    }

    /// BPSK-style constants: one nearest neighbor, full SINR argument.
    pub fn bpsk() -> Self {
        ModulationParams {
            alpha_tilde: 1.0,
            beta_tilde: 2.0,
        }
    }

    /// QPSK-style constants: two nearest neighbors, halved argument scale.
    pub fn qpsk() -> Self {
        ModulationParams {
            alpha_tilde: 2.0,
            beta_tilde: 1.0,
        }
    }

    pub fn alpha_tilde(&self) -> f64 {
        self.alpha_tilde
    }

    pub fn beta_tilde(&self) -> f64 {
        self.beta_tilde
    }
}

/// Average symbol error rate `alpha_tilde * Int Q(beta_tilde g) f(g) dg`.
///
/// The integral is truncated at the tail cutoff; the truncation error is
/// bounded by `alpha_tilde * Q(beta_tilde * cutoff)` (the integrand there
/// times the at-most-unit tail mass) and added to the error estimate.
pub fn avg_ser(
    config: &SystemConfig,
    modulation: &ModulationParams,
    settings: &QuadratureSettings,
) -> Result<QuadEstimate> {
    let alpha = modulation.alpha_tilde;
    let beta = modulation.beta_tilde;
    if alpha == 0.0 {
        return Ok(QuadEstimate {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let cutoff = tail_cutoff(config, settings)?;
    let log_alpha = alpha.ln();
    let r = integrate_fallible(
        |g| {
            let q = q_function(beta * g);
            if q == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(log_alpha + q.ln() + log_f_gamma(g, config, settings)?)
        },
        0.0,
        cutoff,
        settings,
    )?;
    let mut est = r.into_estimate("average SER")?;
    est.abs_error += alpha * q_function(beta * cutoff);
    Ok(est)
}

/// Average sum rate `K * Int log2(1 + g) f(g) dg` in bit/s/Hz.
///
/// The integral is truncated at the tail cutoff. The truncated mass is
/// bounded by the integrand at the cutoff times the local e-folding length
/// of the density tail, measured over the last doubling; the bound is added
/// to the error estimate.
pub fn avg_sum_rate(config: &SystemConfig, settings: &QuadratureSettings) -> Result<QuadEstimate> {
    let k = config.n_users() as f64;
    let log_k = k.ln();
    let cutoff = tail_cutoff(config, settings)?;
    let r = integrate_fallible(
        |g| {
            if g <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            let rate = g.ln_1p() / std::f64::consts::LN_2;
            Ok(log_k + rate.ln() + log_f_gamma(g, config, settings)?)
        },
        0.0,
        cutoff,
        settings,
    )?;
    let mut est = r.into_estimate("average sum rate")?;

    let log_fc = log_f_gamma(cutoff, config, settings)?;
    let log_fc_half = log_f_gamma(0.5 * cutoff, config, settings)?;
    let decay = ((log_fc_half - log_fc) / (0.5 * cutoff)).max(1.0 / cutoff);
    let integrand_at_cutoff = k * (cutoff.ln_1p() / std::f64::consts::LN_2) * log_fc.exp();
    est.abs_error += integrand_at_cutoff / decay;
    Ok(est)
}
