//! Checks the two chi-squared building blocks of the SINR model against
//! simulation at N = 16, K = 8: the signal power x (exact scaled
//! chi-squared with 2N degrees of freedom) and the aggregate interference z
//! (CLT approximation, scaled chi-squared with 2K - 2 degrees of freedom).
//!
//! The x marginal is exact, so its KDE distance is pure smoothing noise;
//! the z marginal carries the model error that the density inherits.
//!
//! Run with `cargo run --release --example component_marginals`.

use mimo_sinr::channel::sample_components_batch;
use mimo_sinr::density::{CurveKind, DensityCurve};
use mimo_sinr::kde::{kde_slice, KdeSettings};
use mimo_sinr::special::{log_f_x, log_f_z};
use mimo_sinr::stats::{compare, moment_summary_slice, quantile};
use mimo_sinr::SystemConfig;

const SAMPLES: usize = 200_000;
const SEED: u64 = 99;

fn main() -> mimo_sinr::Result<()> {
    let config = SystemConfig::from_snr_db(16, 8, 0.0)?;
    println!("sampling {SAMPLES} (x, z) component pairs at N = 16, K = 8 ...");
    let parts = sample_components_batch(&config, SAMPLES, SEED)?;

    let x_mean_model = config.rho_sq();
    let z_mean_model = (config.n_users() - 1) as f64 / config.n_antennas() as f64;

    report("x", &parts.x, x_mean_model, &config, |v, c| {
        log_f_x(v, c).value()
    })?;
    println!();
    report("z", &parts.z, z_mean_model, &config, |v, c| {
        log_f_z(v, c).value()
    })?;
    Ok(())
}

fn report(
    name: &str,
    samples: &[f64],
    model_mean: f64,
    config: &SystemConfig,
    density: impl Fn(f64, &SystemConfig) -> f64,
) -> mimo_sinr::Result<()> {
    let moments = moment_summary_slice(samples)?;
    let rel = (moments.mean - model_mean).abs() / model_mean;
    println!(
        "{name}: sample mean = {:.5}, model mean = {:.5} (rel. diff {:.3}%)",
        moments.mean,
        model_mean,
        100.0 * rel
    );

    let empirical = kde_slice(samples, config, &KdeSettings::default())?;
    let analytic_values: Vec<f64> = empirical.grid().iter().map(|&v| density(v, config)).collect();
    let analytic = DensityCurve::new(
        empirical.grid().to_vec(),
        analytic_values,
        CurveKind::Analytic,
        *config,
    )?;

    let lo = quantile(samples, 0.001)?;
    let distance = compare(&analytic.clipped_below(lo)?, &empirical.clipped_below(lo)?)?;
    println!(
        "{name}: L1 distance KDE vs closed form = {:.5}, sup = {:.5}",
        distance.l1, distance.sup
    );
    Ok(())
}
