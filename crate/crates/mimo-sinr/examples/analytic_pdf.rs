//! Evaluates the closed-form (single-integral) SINR density for the
//! N = 16, K = 8 downlink at three transmit SNRs and prints a compact
//! table, together with each curve's mode and total mass.
//!
//! Run with `cargo run --release --example analytic_pdf`.

use mimo_sinr::density::{density_mode, f_gamma, normalization, GridSpec};
use mimo_sinr::quadrature::QuadratureSettings;
use mimo_sinr::SystemConfig;

fn main() -> mimo_sinr::Result<()> {
    let settings = QuadratureSettings::default();
    let grid = GridSpec::new(0.25, 6.0, 24)?;

    let configs: Vec<SystemConfig> = [0.0, 5.0, 10.0]
        .iter()
        .map(|&snr| SystemConfig::from_snr_db(16, 8, snr))
        .collect::<mimo_sinr::Result<_>>()?;

    println!("f_gamma(gamma) for N = 16, K = 8");
    println!();
    print!("{:>8}", "gamma");
    for c in &configs {
        print!("{:>14}", format!("{:.0} dB", c.snr_db()));
    }
    println!();

    for gamma in grid.values() {
        print!("{gamma:>8.3}");
        for config in &configs {
            print!("{:>14.6}", f_gamma(gamma, config, &settings)?);
        }
        println!();
    }

    println!();
    for config in &configs {
        let mode = density_mode(config, &settings)?;
        let mass = normalization(config, &settings)?;
        println!(
            "SNR {:>2.0} dB: mode at gamma = {:.4}, total mass = {:.8} (+/- {:.1e})",
            config.snr_db(),
            mode,
            mass.value,
            mass.abs_error,
        );
    }
    Ok(())
}
