//! Monte Carlo simulation of the exact downlink SINR under matched-filter
//! beamforming.
//!
//! Sampling is deterministic and thread-count independent: draws are split
//! into fixed-size shards, each shard runs its own counter-seeded ChaCha
//! stream, and shard outputs are concatenated in shard order. Running with
//! one rayon thread or sixteen produces byte-identical sample sets.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Draws per RNG shard. Each shard is an independent ChaCha stream, so this
/// constant is part of the reproducibility contract: changing it changes the
/// samples produced for a given seed.
const SHARD_SIZE: usize = 16_384;

/// One draw of the full K x N channel matrix, rows indexed by user.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    n_antennas: usize,
    entries: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn n_users(&self) -> usize {
        self.entries.len() / self.n_antennas
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    /// The channel vector of one user.
    pub fn channel(&self, user: usize) -> &[Complex64] {
        let n = self.n_antennas;
        &self.entries[user * n..(user + 1) * n]
    }
}

/// Draws one channel realization: every entry is an independent circular
/// complex Gaussian with variance `sigma_h_sq` (each real component scaled by
/// `sigma_h / sqrt(2)`). A user vector that comes out identically zero is
/// redrawn, keeping every beamforming normalization well defined.
pub fn sample_channel<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> ChannelRealization {
    let n = config.n_antennas();
    let k = config.n_users();
    let mut entries = vec![Complex64::new(0.0, 0.0); k * n];
    fill_channel(config, rng, &mut entries);
    ChannelRealization {
        n_antennas: n,
        entries,
    }
}

fn fill_channel<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R, entries: &mut [Complex64]) {
    let n = config.n_antennas();
    let scale = (config.sigma_h_sq() / 2.0).sqrt();
    for row in entries.chunks_mut(n) {
        loop {
            for e in row.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *e = Complex64::new(re * scale, im * scale);
            }
            if row.iter().any(|e| e.re != 0.0 || e.im != 0.0) {
                break;
            }
        }
    }
}

/// Signal power and raw interference sum for one user:
/// returns `(||h_u||^2, sum_{l != u} |h_u^T h_l^*|^2 / ||h_l||^2)`.
fn signal_and_interference(entries: &[Complex64], n: usize, user: usize) -> (f64, f64) {
    let hu = &entries[user * n..(user + 1) * n];
    let norm_u: f64 = hu.iter().map(|c| c.norm_sqr()).sum();
    let mut interference = 0.0;
    for (l, hl) in entries.chunks(n).enumerate() {
        if l == user {
            continue;
        }
        let mut dot = Complex64::new(0.0, 0.0);
        let mut norm_l = 0.0;
        for (a, b) in hu.iter().zip(hl.iter()) {
            dot += a * b.conj();
            norm_l += b.norm_sqr();
        }
        interference += dot.norm_sqr() / norm_l;
    }
    (norm_u, interference)
}

/// The exact instantaneous SINR of one user under matched-filter precoding
/// with per-user power normalization:
///
/// `gamma_u = (rho^2/(N sigma_h^2)) ||h_u||^2
///          / (sigma_n^2 + (rho^2/(N sigma_h^2)) sum_{l != u} |h_u^T h_l^*|^2 / ||h_l||^2)`.
pub fn exact_sinr(
    real: &ChannelRealization,
    config: &SystemConfig,
    user_index: usize,
) -> Result<f64> {
    if real.n_antennas() != config.n_antennas() || real.n_users() != config.n_users() {
        return Err(Error::invalid(format!(
            "realization shape {}x{} does not match config {}x{}",
            real.n_users(),
            real.n_antennas(),
            config.n_users(),
            config.n_antennas()
        )));
    }
    if user_index >= real.n_users() {
        return Err(Error::invalid(format!(
            "user_index {user_index} out of range for {} users",
            real.n_users()
        )));
    }
    let (norm_u, interference) =
        signal_and_interference(&real.entries, real.n_antennas, user_index);
    let scale = config.rho_sq() / (config.n_antennas() as f64 * config.sigma_h_sq());
    Ok(scale * norm_u / (config.sigma_n_sq() + scale * interference))
}

/// A batch of i.i.d. SINR draws for user 0, tagged with the configuration and
/// seed that produced them.
#[derive(Debug, Clone)]
pub struct SinrSampleSet {
    config: SystemConfig,
    seed: u64,
    samples: Vec<f64>,
}

impl SinrSampleSet {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Writes the raw samples, one per line, with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::with_capacity(self.samples.len() * 24);
        for s in &self.samples {
            buf.push_str(&format!("{s:.16e}\n"));
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }
}

/// The per-draw decomposition used to validate the model term by term:
/// `x` is the scaled signal power, `z` the normalized interference sum
/// `x`-independent by construction, and `gamma` the exact SINR.
#[derive(Debug, Clone)]
pub struct ComponentSamples {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// Draws `count` independent SINR samples for user 0. Deterministic in
/// `(config, count, seed)` regardless of thread count.
pub fn sample_sinr_batch(config: &SystemConfig, count: usize, seed: u64) -> Result<SinrSampleSet> {
    let samples = run_sharded(config, count, seed, |scale, norm_u, interference, sigma_n_sq| {
        scale * norm_u / (sigma_n_sq + scale * interference)
    })?;
    Ok(SinrSampleSet {
        config: *config,
        seed,
        samples,
    })
}

/// Draws `count` independent `(x, z, gamma)` triples for user 0, from the
/// same channel law (and, for a given seed, the same channel draws) as
/// [`sample_sinr_batch`].
pub fn sample_components_batch(
    config: &SystemConfig,
    count: usize,
    seed: u64,
) -> Result<ComponentSamples> {
    let triples = run_sharded(config, count, seed, |scale, norm_u, interference, sigma_n_sq| {
        let x = scale * norm_u;
        let z = interference / norm_u;
        let gamma = scale * norm_u / (sigma_n_sq + scale * interference);
        (x, z, gamma)
    })?;
    let mut out = ComponentSamples {
        x: Vec::with_capacity(count),
        z: Vec::with_capacity(count),
        gamma: Vec::with_capacity(count),
    };
    for (x, z, gamma) in triples {
        out.x.push(x);
        out.z.push(z);
        out.gamma.push(gamma);
    }
    Ok(out)
}

fn run_sharded<T, F>(config: &SystemConfig, count: usize, seed: u64, per_draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64, f64, f64, f64) -> T + Sync,
{
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let n = config.n_antennas();
    let k = config.n_users();
    let scale = config.rho_sq() / (n as f64 * config.sigma_h_sq());
    let sigma_n_sq = config.sigma_n_sq();
    let shards = count.div_ceil(SHARD_SIZE);

    let mut chunks: Vec<Vec<T>> = Vec::with_capacity(shards);
    (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let lo = shard * SHARD_SIZE;
            let hi = count.min(lo + SHARD_SIZE);
            let mut entries = vec![Complex64::new(0.0, 0.0); k * n];
            let mut out = Vec::with_capacity(hi - lo);
            for _ in lo..hi {
                fill_channel(config, &mut rng, &mut entries);
                let (norm_u, interference) = signal_and_interference(&entries, n, 0);
                out.push(per_draw(scale, norm_u, interference, sigma_n_sq));
            }
            out
        })
        .collect_into_vec(&mut chunks);

    let mut all = Vec::with_capacity(count);
    for c in chunks {
        all.extend(c);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, k: usize, rho_sq: f64) -> SystemConfig {
        SystemConfig::new(n, k, rho_sq.sqrt(), 1.0, 1.0).unwrap()
    }

    #[test]
    fn channel_entries_have_expected_moments() {
        let c = SystemConfig::new(8, 4, 1.0, 2.5, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut mean = Complex64::new(0.0, 0.0);
        let mut var = 0.0;
        let draws = 2000;
        for _ in 0..draws {
            let real = sample_channel(&c, &mut rng);
            assert_eq!(real.n_users(), 4);
            assert_eq!(real.n_antennas(), 8);
            for u in 0..4 {
                for e in real.channel(u) {
                    mean += e;
                    var += e.norm_sqr();
                }
            }
        }
        let total = (draws * 32) as f64;
        mean /= total;
        var /= total;
        assert!(mean.norm() < 0.02, "mean {mean}");
        assert!((var - 2.5).abs() < 0.05, "var {var}");
    }

    #[test]
    fn exact_sinr_matches_hand_computation() {
        // N = 2, K = 2, entries chosen so every quantity is rational.
        let real = ChannelRealization {
            n_antennas: 2,
            entries: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(2.0, 0.0),
            ],
        };
        let c = SystemConfig::new(2, 2, 2.0, 1.0, 0.5).unwrap();
        // scale = rho^2/(N sigma_h^2) = 2. ||h_0||^2 = 2.
        // h_0^T h_1^* = (1-i) + i(2) = 1 + i, |.|^2 = 2, ||h_1||^2 = 6.
        // gamma = 2*2 / (0.5 + 2*(2/6)) = 4 / (7/6) = 24/7.
        let got = exact_sinr(&real, &c, 0).unwrap();
        assert!((got - 24.0 / 7.0).abs() < 1e-15, "got {got}");

        // And for user 1: h_1^T h_0^* = (1+i)*1 + 2*(-i) = 1 - i, |.|^2 = 2,
        // ||h_0||^2 = 2 -> gamma = 2*6 / (0.5 + 2*(2/2)) = 12/2.5.
        let got = exact_sinr(&real, &c, 1).unwrap();
        assert!((got - 4.8).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn exact_sinr_validates_inputs() {
        let c = cfg(4, 3, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let real = sample_channel(&c, &mut rng);
        assert!(exact_sinr(&real, &c, 3).is_err());
        let other = cfg(8, 3, 1.0);
        assert!(exact_sinr(&real, &other, 0).is_err());
    }

    #[test]
    fn batch_is_deterministic_across_thread_counts() {
        let c = cfg(4, 3, 1.0);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let quad = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = single.install(|| sample_sinr_batch(&c, 40_000, 99).unwrap());
        let b = quad.install(|| sample_sinr_batch(&c, 40_000, 99).unwrap());
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn batch_seed_and_count_contract() {
        let c = cfg(4, 3, 1.0);
        let a = sample_sinr_batch(&c, 1000, 5).unwrap();
        let b = sample_sinr_batch(&c, 1000, 5).unwrap();
        assert_eq!(a.samples(), b.samples());
        let d = sample_sinr_batch(&c, 1000, 6).unwrap();
        assert_ne!(a.samples(), d.samples());
        // A longer run extends the shorter one within a shard boundary.
        let long = sample_sinr_batch(&c, 1500, 5).unwrap();
        assert_eq!(&long.samples()[..1000], a.samples());
        assert_eq!(a.seed(), 5);
        assert_eq!(a.len(), 1000);
        assert!(sample_sinr_batch(&c, 0, 5).is_err());
    }

    #[test]
    fn samples_are_positive_and_finite() {
        let c = cfg(8, 4, 10.0);
        let s = sample_sinr_batch(&c, 20_000, 42).unwrap();
        assert!(s.samples().iter().all(|&g| g.is_finite() && g > 0.0));
    }

    #[test]
    fn sinr_is_invariant_to_channel_variance() {
        // gamma is scale-free in sigma_h: doubling sigma_h rescales signal
        // and interference identically.
        let a = SystemConfig::new(8, 4, 2.0, 1.0, 1.0).unwrap();
        let b = SystemConfig::new(8, 4, 2.0, 4.0, 1.0).unwrap();
        let sa = sample_sinr_batch(&a, 5000, 11).unwrap();
        let sb = sample_sinr_batch(&b, 5000, 11).unwrap();
        for (x, y) in sa.samples().iter().zip(sb.samples()) {
            assert!((x - y).abs() <= 1e-12 * x.abs(), "{x} vs {y}");
        }
    }

    #[test]
    fn components_match_direct_batch() {
        let c = cfg(8, 4, 3.0);
        let direct = sample_sinr_batch(&c, 3000, 17).unwrap();
        let comp = sample_components_batch(&c, 3000, 17).unwrap();
        assert_eq!(direct.samples(), comp.gamma.as_slice());
        // gamma = x / (sigma_n^2 + x z) must hold draw by draw.
        for i in 0..3000 {
            let x = comp.x[i];
            let z = comp.z[i];
            let g = comp.gamma[i];
            let recon = x / (c.sigma_n_sq() + x * z);
            assert!((g - recon).abs() <= 1e-12 * g, "draw {i}");
        }
    }

    #[test]
    fn component_moments_match_model() {
        // x ~ C_S chi^2(2N): mean 2 N C_S = rho^2. z ~ C_I chi^2(2K-2)
        // approximately: mean (K-1)/N exactly (true in the exact law too).
        let c = cfg(16, 8, 10.0);
        let comp = sample_components_batch(&c, 200_000, 123).unwrap();
        let mx = comp.x.iter().sum::<f64>() / comp.x.len() as f64;
        let mz = comp.z.iter().sum::<f64>() / comp.z.len() as f64;
        assert!((mx - 10.0).abs() < 0.05, "mean x {mx}");
        assert!((mz - 7.0 / 16.0).abs() < 0.005, "mean z {mz}");
    }

    #[test]
    fn csv_output_has_full_precision() {
        let c = cfg(4, 3, 1.0);
        let s = sample_sinr_batch(&c, 8, 3).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        for (line, want) in lines.iter().zip(s.samples()) {
            let got: f64 = line.parse().unwrap();
            assert_eq!(got, *want, "round trip of {line}");
        }
    }
}
