//! Gaussian kernel density estimation for empirical SINR curves.
//!
//! Evaluation is exact (no binning): each sample's kernel is accumulated
//! over the grid points lying within 8.5 bandwidths, where the discarded
//! kernel mass is below the f64 epsilon relative to the peak. Samples are
//! processed in fixed-size chunks whose partial grids are merged in chunk
//! order, so results are identical for any rayon thread count.

use rayon::prelude::*;

use crate::channel::SinrSampleSet;
use crate::config::SystemConfig;
use crate::density::{CurveKind, DensityCurve};
use crate::error::{Error, Result};

/// Kernel radius in bandwidths beyond which contributions are dropped:
/// exp(-8.5^2/2) is about 2e-16, below f64 resolution of the accumulated sum.
const KERNEL_RADIUS: f64 = 8.5;

const CHUNK: usize = 16_384;

/// Bandwidth selection rule for [`kde`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Silverman's rule of thumb on the robust spread estimate.
    Silverman,
    /// A caller-chosen bandwidth.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct KdeSettings {
    bandwidth: Bandwidth,
    grid_points: usize,
}

impl KdeSettings {
    pub fn new(bandwidth: Bandwidth, grid_points: usize) -> Result<Self> {
        if let Bandwidth::Fixed(h) = bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::invalid(format!(
                    "fixed bandwidth must be finite and positive, got {h}"
                )));
            }
        }
        if grid_points < 16 {
            return Err(Error::invalid("kde grid needs at least 16 points"));
        }
        Ok(KdeSettings {
            bandwidth,
            grid_points,
        })
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.bandwidth
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }
}

impl Default for KdeSettings {
    fn default() -> Self {
        KdeSettings {
            bandwidth: Bandwidth::Silverman,
            grid_points: 512,
        }
    }
}

/// Silverman's rule-of-thumb bandwidth:
/// `0.9 min(std, IQR/1.34) n^(-1/5)`, falling back to whichever spread
/// estimate is positive when the other degenerates.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::invalid(
            "silverman bandwidth needs at least 2 samples",
        ));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let ss: f64 = samples.iter().map(|s| (s - mean) * (s - mean)).sum();
    let std = (ss / (n - 1.0)).sqrt();

    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = type7_quantile(&sorted, 0.75) - type7_quantile(&sorted, 0.25);

    let spread = match (std > 0.0, iqr > 0.0) {
        (true, true) => std.min(iqr / 1.34),
        (true, false) => std,
        (false, true) => iqr / 1.34,
        (false, false) => {
            return Err(Error::invalid(
                "samples have zero spread, bandwidth is undefined",
            ))
        }
    };
    Ok(0.9 * spread * n.powf(-0.2))
}

fn type7_quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Kernel density estimate of a SINR sample set on a uniform grid covering
/// `[min - 3h, max + 3h]` (clipped to stay inside the positive support).
pub fn kde(samples: &SinrSampleSet, settings: &KdeSettings) -> Result<DensityCurve> {
    kde_slice(samples.samples(), samples.config(), settings)
}

/// [`kde`] over a raw slice of positive values, used for the signal and
/// interference component densities.
pub fn kde_slice(
    samples: &[f64],
    config: &SystemConfig,
    settings: &KdeSettings,
) -> Result<DensityCurve> {
    if samples.is_empty() {
        return Err(Error::invalid("kde needs at least 1 sample"));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &s in samples {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::invalid(format!(
                "kde samples must be finite and positive, got {s}"
            )));
        }
        min = min.min(s);
        max = max.max(s);
    }

    let h = match settings.bandwidth {
        Bandwidth::Fixed(h) => h,
        Bandwidth::Silverman => silverman_bandwidth(samples)?,
    };

    let mut lo = min - 3.0 * h;
    let hi = max + 3.0 * h;
    if lo <= 0.0 {
        // The density lives on positive support; cover as much of the left
        // kernel shoulder as positivity permits.
        lo = min / 2.0;
    }
    let points = settings.grid_points;
    let step = (hi - lo) / (points - 1) as f64;

    let partials: Vec<Vec<f64>> = samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0f64; points];
            for &s in chunk {
                let from = ((s - KERNEL_RADIUS * h - lo) / step).ceil().max(0.0) as usize;
                let to_f = ((s + KERNEL_RADIUS * h - lo) / step).floor();
                if to_f < from as f64 {
                    continue;
                }
                let to = (to_f as usize).min(points - 1);
                for (j, a) in acc[from..=to].iter_mut().enumerate() {
                    let u = (lo + (from + j) as f64 * step - s) / h;
                    *a += (-0.5 * u * u).exp();
                }
            }
            acc
        })
        .collect();

    let norm = 1.0 / (samples.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    let mut values = vec![0.0f64; points];
    for part in &partials {
        for (v, p) in values.iter_mut().zip(part) {
            *v += p;
        }
    }
    for v in &mut values {
        *v *= norm;
    }

    let grid = (0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                lo + i as f64 * step
            }
        })
        .collect();
    DensityCurve::new(grid, values, CurveKind::Empirical, *config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn cfg() -> SystemConfig {
        SystemConfig::new(16, 8, 1.0, 1.0, 1.0).unwrap()
    }

    fn normal_samples(mean: f64, sd: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Normal::new(mean, sd).unwrap();
        (0..n).map(|_| dist.sample(&mut rng)).collect()
    }

    #[test]
    fn silverman_matches_hand_computation() {
        let samples = [1.0, 2.0, 3.0, 4.0, 5.0];
        // std = sqrt(2.5), iqr = 2 -> spread = min(1.5811, 1.4925) = 2/1.34.
        let want = 0.9 * (2.0 / 1.34) * 5f64.powf(-0.2);
        let got = silverman_bandwidth(&samples).unwrap();
        assert!((got - want).abs() < 1e-15, "got {got}, want {want}");
    }

    #[test]
    fn silverman_rejects_degenerate_input() {
        assert!(silverman_bandwidth(&[1.0]).is_err());
        assert!(silverman_bandwidth(&[2.0, 2.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn silverman_survives_zero_iqr_with_positive_std() {
        // Heavy point mass in the quartiles, spread in the tails.
        let mut samples = vec![5.0; 100];
        samples[0] = 1.0;
        samples[99] = 9.0;
        let h = silverman_bandwidth(&samples).unwrap();
        assert!(h > 0.0);
    }

    #[test]
    fn single_kernel_is_an_exact_gaussian() {
        let settings = KdeSettings::new(Bandwidth::Fixed(0.5), 64).unwrap();
        let curve = kde_slice(&[2.0], &cfg(), &settings).unwrap();
        assert_eq!(curve.kind(), CurveKind::Empirical);
        assert_eq!(curve.len(), 64);
        assert_eq!(curve.grid()[0], 0.5);
        assert_eq!(*curve.grid().last().unwrap(), 3.5);
        let norm = 0.5 * (2.0 * std::f64::consts::PI).sqrt();
        for (g, v) in curve.grid().iter().zip(curve.values()) {
            let u = (g - 2.0) / 0.5;
            let want = (-0.5 * u * u).exp() / norm;
            assert!(
                (v - want).abs() <= 1e-14 * want.max(1e-300),
                "at {g}: {v} vs {want}"
            );
        }
    }

    #[test]
    fn estimates_a_normal_density() {
        // The module contract: 1e5 normal-shaped samples, Silverman rule,
        // L1 distance to the true density under 0.02.
        let samples = normal_samples(10.0, 1.0, 100_000, 42);
        let curve = kde_slice(&samples, &cfg(), &KdeSettings::default()).unwrap();
        let mass = curve.trapezoid_mass();
        assert!((mass - 1.0).abs() < 1e-2, "mass {mass}");

        let norm = (2.0 * std::f64::consts::PI).sqrt();
        let mut l1 = 0.0;
        let grid = curve.grid();
        for i in 1..grid.len() {
            let d = |j: usize| {
                let u = grid[j] - 10.0;
                (curve.values()[j] - (-0.5 * u * u).exp() / norm).abs()
            };
            l1 += 0.5 * (d(i) + d(i - 1)) * (grid[i] - grid[i - 1]);
        }
        assert!(l1 < 0.02, "L1 distance {l1}");
    }

    #[test]
    fn translation_equivariance() {
        let samples = normal_samples(8.0, 0.7, 20_000, 7);
        let shifted: Vec<f64> = samples.iter().map(|s| s + 5.0).collect();
        let a = kde_slice(&samples, &cfg(), &KdeSettings::default()).unwrap();
        let b = kde_slice(&shifted, &cfg(), &KdeSettings::default()).unwrap();
        for i in 0..a.len() {
            let dg = b.grid()[i] - a.grid()[i];
            assert!((dg - 5.0).abs() < 1e-9, "grid shift {dg}");
            let (va, vb) = (a.values()[i], b.values()[i]);
            assert!(
                (va - vb).abs() <= 1e-12 * va.max(1e-12),
                "value drift at {i}: {va} vs {vb}"
            );
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let samples = normal_samples(10.0, 1.0, 60_000, 3);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let quad = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let c = cfg();
        let a = single.install(|| kde_slice(&samples, &c, &KdeSettings::default()).unwrap());
        let b = quad.install(|| kde_slice(&samples, &c, &KdeSettings::default()).unwrap());
        assert_eq!(a.values(), b.values());
        assert_eq!(a.grid(), b.grid());
    }

    #[test]
    fn grid_clips_to_positive_support() {
        // Samples hugging zero: min - 3h would cross into negatives.
        let samples = vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.4];
        let curve = kde_slice(&samples, &cfg(), &KdeSettings::default()).unwrap();
        assert!(curve.grid()[0] > 0.0);
        assert_eq!(curve.grid()[0], 0.005);
    }

    #[test]
    fn rejects_bad_samples_and_settings() {
        let c = cfg();
        assert!(kde_slice(&[], &c, &KdeSettings::default()).is_err());
        assert!(kde_slice(&[1.0, -2.0], &c, &KdeSettings::default()).is_err());
        assert!(kde_slice(&[1.0, f64::NAN], &c, &KdeSettings::default()).is_err());
        assert!(KdeSettings::new(Bandwidth::Fixed(0.0), 64).is_err());
        assert!(KdeSettings::new(Bandwidth::Fixed(f64::NAN), 64).is_err());
        assert!(KdeSettings::new(Bandwidth::Silverman, 2).is_err());
    }

    #[test]
    fn respects_grid_point_count() {
        let samples = normal_samples(10.0, 1.0, 1000, 9);
        let settings = KdeSettings::new(Bandwidth::Silverman, 101).unwrap();
        let curve = kde_slice(&samples, &cfg(), &settings).unwrap();
        assert_eq!(curve.len(), 101);
    }
}
