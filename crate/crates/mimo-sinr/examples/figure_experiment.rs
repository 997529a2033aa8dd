//! Runs the full experiment pipeline for one figure configuration
//! (N = 16, K = 8, SNR = 10 dB) with a reduced sample budget and prints
//! where the artifacts landed plus the headline numbers from the summary.
//!
//! The `mimo-sinr` binary drives the same pipeline from the command line;
//! presets fig1..fig6 cover all figure configurations at full budget.
//!
//! Run with `cargo run --release --example figure_experiment`.

use std::path::Path;

use mimo_sinr::experiment::{run, ExperimentSpec};
use mimo_sinr::SystemConfig;

fn main() -> mimo_sinr::Result<()> {
    let config = SystemConfig::from_snr_db(16, 8, 10.0)?;
    let mut spec = ExperimentSpec::new(config);
    spec.samples = 100_000;
    spec.seed = 1;

    let out_dir = Path::new("target/example-out");
    let report = run(&spec, out_dir)?;

    println!("artifacts:");
    for file in &report.files {
        println!("  {}", file.display());
    }

    let s = &report.summary;
    println!();
    println!("seed                 {}", s.seed);
    println!("l1 distance          {:.5}", s.l1.unwrap());
    println!("sup distance         {:.5}", s.sup.unwrap());
    println!("avg SER              {:.6e}", s.ser.unwrap().value);
    println!("sum rate             {:.5} bit/s/Hz", s.sum_rate.unwrap().value);
    println!("normalization        {:.8}", s.normalization_check.unwrap());
    println!("max quadrature error {:.2e}", s.quadrature_max_error.unwrap());
    println!("runtime              {:.2} s", s.runtime_s);

    let moments = s.moments.unwrap();
    println!(
        "sample moments       mean {:.4}, var {:.4}, skew {:.4}, ex. kurt {:.4}",
        moments.mean,
        moments.variance,
        moments.skewness.unwrap_or(f64::NAN),
        moments.excess_kurtosis.unwrap_or(f64::NAN),
    );
    Ok(())
}
