//! Distances between density curves and summary statistics of sample sets.

use serde::Serialize;

use crate::channel::SinrSampleSet;
use crate::density::DensityCurve;
use crate::error::{Error, Result};

/// L1 and sup distances between two density curves on their common support.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityDistance {
    pub l1: f64,
    pub sup: f64,
    /// Number of points in the merged comparison grid.
    pub common_grid_points: usize,
}

/// Compares two curves for the same configuration on the overlap of their
/// grids: both are linearly interpolated onto the merged grid, the L1
/// distance is the trapezoid integral of the absolute difference, and the
/// sup distance is its maximum. Symmetric in its arguments.
pub fn compare(a: &DensityCurve, b: &DensityCurve) -> Result<DensityDistance> {
    if a.config() != b.config() {
        return Err(Error::invalid(
            "cannot compare curves from different configurations",
        ));
    }
    let lo = a.grid()[0].max(b.grid()[0]);
    let hi = a.grid().last().unwrap().min(*b.grid().last().unwrap());
    if !(hi > lo) {
        return Err(Error::invalid(format!(
            "curve supports do not overlap (intersection [{lo}, {hi}])"
        )));
    }

    let mut merged: Vec<f64> = a
        .grid()
        .iter()
        .chain(b.grid().iter())
        .copied()
        .filter(|&g| g >= lo && g <= hi)
        .collect();
    merged.sort_by(f64::total_cmp);
    merged.dedup();

    let mut l1 = 0.0;
    let mut sup = 0.0f64;
    let mut prev: Option<(f64, f64)> = None;
    for &g in &merged {
        let d = (a.interpolate(g) - b.interpolate(g)).abs();
        sup = sup.max(d);
        if let Some((pg, pd)) = prev {
            l1 += 0.5 * (d + pd) * (g - pg);
        }
        prev = Some((g, d));
    }
    Ok(DensityDistance {
        l1,
        sup,
        common_grid_points: merged.len(),
    })
}

/// First four standardized moments of a sample set. Skewness and excess
/// kurtosis are absent when the samples have zero variance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

pub fn moment_summary(samples: &SinrSampleSet) -> Result<MomentSummary> {
    moment_summary_slice(samples.samples())
}

pub fn moment_summary_slice(samples: &[f64]) -> Result<MomentSummary> {
    if samples.len() < 2 {
        return Err(Error::invalid("moment summary needs at least 2 samples"));
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &s in samples {
        let d = s - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let variance = m2 / (n - 1.0);
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
    } else {
        (None, None)
    };
    Ok(MomentSummary {
        mean,
        variance,
        skewness,
        excess_kurtosis,
    })
}

/// Type-7 (linear interpolation) sample quantile, `p` in `[0, 1]`.
pub fn quantile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("quantile of an empty sample set"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("quantile level {p} outside [0, 1]")));
    }
    if samples.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("samples must not contain NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        Ok(sorted[lo])
    } else {
        Ok(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
    }
}
