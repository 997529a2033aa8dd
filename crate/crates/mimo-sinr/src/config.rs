use serde::Serialize;

use crate::error::{Error, Result};

/// System-level parameters of the matched-filter downlink.
///
/// `n_antennas` is the base-station array size N, `n_users` the number of
/// simultaneously served single-antenna users K. `rho` is the total transmit
/// amplitude budget, `sigma_h_sq` the per-entry channel variance, and
/// `sigma_n_sq` the receiver noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemConfig {
    n_antennas: usize,
    n_users: usize,
    rho: f64,
    sigma_h_sq: f64,
    sigma_n_sq: f64,
}

impl SystemConfig {
    /// Builds a configuration, validating every field.
    pub fn new(
        n_antennas: usize,
        n_users: usize,
        rho: f64,
        sigma_h_sq: f64,
        sigma_n_sq: f64,
    ) -> Result<Self> {
        if n_antennas == 0 {
            return Err(Error::invalid("n_antennas must be at least 1"));
        }
        if n_users < 2 {
            return Err(Error::invalid(
                "n_users must be at least 2 (one served user plus interference)",
            ));
        }
        for (name, value) in [
            ("rho", rho),
            ("sigma_h_sq", sigma_h_sq),
            ("sigma_n_sq", sigma_n_sq),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and positive, got {value}"
                )));
            }
        }
        Ok(SystemConfig {
            n_antennas,
            n_users,
            rho,
            sigma_h_sq,
            sigma_n_sq,
        })
    }

    /// Convenience constructor: unit channel and noise variances, transmit
    /// amplitude chosen so that `rho^2 / sigma_n^2` equals the given SNR in dB.
    pub fn from_snr_db(n_antennas: usize, n_users: usize, snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::invalid(format!("snr_db must be finite, got {snr_db}")));
        }
        let rho = 10f64.powf(snr_db / 20.0);
        SystemConfig::new(n_antennas, n_users, rho, 1.0, 1.0)
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_sq(&self) -> f64 {
        self.rho * self.rho
    }

    pub fn sigma_h_sq(&self) -> f64 {
        self.sigma_h_sq
    }

    pub fn sigma_n_sq(&self) -> f64 {
        self.sigma_n_sq
    }

    /// Transmit SNR in dB, `10 log10(rho^2 / sigma_n^2)`.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.rho_sq() / self.sigma_n_sq).log10()
    }

    /// Scale of the desired-signal power: the signal term is
    /// `signal_scale()` times a chi-squared variable with `2 * n_antennas`
    /// degrees of freedom.
    pub fn signal_scale(&self) -> f64 {
        self.rho_sq() / (2.0 * self.n_antennas as f64)
    }

    /// Scale of the aggregate interference: the interference term is
    /// approximately `interference_scale()` times a chi-squared variable with
    /// `2 * (n_users - 1)` degrees of freedom.
    pub fn interference_scale(&self) -> f64 {
        1.0 / (2.0 * self.n_antennas as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accessors_round_trip() {
        let c = SystemConfig::new(16, 8, 2.0, 1.5, 0.5).unwrap();
        assert_eq!(c.n_antennas(), 16);
        assert_eq!(c.n_users(), 8);
        assert_eq!(c.rho(), 2.0);
        assert_eq!(c.rho_sq(), 4.0);
        assert_eq!(c.sigma_h_sq(), 1.5);
        assert_eq!(c.sigma_n_sq(), 0.5);
    }

    #[test]
    fn derived_scales() {
        let c = SystemConfig::new(16, 8, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(c.signal_scale(), 4.0 / 32.0);
        assert_eq!(c.interference_scale(), 1.0 / 32.0);
    }

    #[test]
    fn snr_constructor_matches_accessor() {
        for snr in [-10.0, 0.0, 5.0, 10.0, 23.5] {
            let c = SystemConfig::from_snr_db(32, 16, snr).unwrap();
            assert!((c.snr_db() - snr).abs() < 1e-12, "snr {snr}");
            assert_eq!(c.sigma_h_sq(), 1.0);
            assert_eq!(c.sigma_n_sq(), 1.0);
        }
        let c = SystemConfig::from_snr_db(16, 8, 10.0).unwrap();
        assert!((c.rho_sq() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SystemConfig::new(0, 8, 1.0, 1.0, 1.0).is_err());
        assert!(SystemConfig::new(16, 1, 1.0, 1.0, 1.0).is_err());
        assert!(SystemConfig::new(16, 8, 0.0, 1.0, 1.0).is_err());
        assert!(SystemConfig::new(16, 8, -1.0, 1.0, 1.0).is_err());
        assert!(SystemConfig::new(16, 8, 1.0, f64::NAN, 1.0).is_err());
        assert!(SystemConfig::new(16, 8, 1.0, 1.0, f64::INFINITY).is_err());
        assert!(SystemConfig::from_snr_db(16, 8, f64::NAN).is_err());
    }
}
