//! Seeded Rayleigh channel generation with transmit-side correlation.
//!
//! # Random streams
//!
//! Every stream is ChaCha20 (`rand_chacha::ChaCha20Rng`) keyed by the 64-bit
//! seed written little-endian into the first 8 bytes of an otherwise zero
//! 256-bit key, with the ChaCha stream id set to the substream id and the
//! word position at 0. Monte Carlo trial `t` always uses substream `t`, so a
//! trial's channel does not depend on the trial count, on evaluation order,
//! or on which covariance is being evaluated.
//!
//! Uniforms take the top 53 bits of a `u64`. Complex Gaussians use
//! Box–Muller on one uniform pair `(u1, u2)` with `u1 ∈ (0, 1]`:
//! `z = sqrt(−ln u1) · e^{2πi·u2}`, giving independent real and imaginary
//! parts with variance ½ each (unit total variance).

use std::f64::consts::PI;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, LinalgError, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("antenna counts must be positive (n_t = {n_t}, n_r = {n_r})")]
    Antennas { n_t: usize, n_r: usize },
    #[error("trials must be at least 1")]
    Trials,
    #[error("snr_db must be finite, got {0}")]
    Snr(f64),
}

/// Antenna counts, SNR and Monte Carlo budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub n_t: usize,
    pub n_r: usize,
    /// SNR `γ₀ = E_s/N₀` in dB.
    pub snr_db: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            n_t: 4,
            n_r: 4,
            snr_db: 30.0,
            trials: 10_000,
            seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_t == 0 || self.n_r == 0 {
            return Err(ConfigError::Antennas {
                n_t: self.n_t,
                n_r: self.n_r,
            });
        }
        if self.trials == 0 {
            return Err(ConfigError::Trials);
        }
        if !self.snr_db.is_finite() {
            return Err(ConfigError::Snr(self.snr_db));
        }
        Ok(())
    }

    pub fn gamma0(&self) -> f64 {
        snr_linear(self.snr_db)
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        Self { snr_db, ..self.clone() }
    }

    pub fn with_trials(&self, trials: usize) -> Self {
        Self { trials, ..self.clone() }
    }
}

/// `10^(dB/10)`.
pub fn snr_linear(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Deterministic ChaCha20 stream identified by `(seed, substream_id)`.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha20Rng,
    seed: u64,
    substream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, substream_id: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(substream_id);
        Self {
            rng,
            seed,
            substream_id,
        }
    }

    /// Stream for Monte Carlo trial `trial`.
    pub fn for_trial(seed: u64, trial: usize) -> Self {
        Self::new(seed, trial as u64)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream_id(&self) -> u64 {
        self.substream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform_open_zero(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Circular complex Gaussian with unit total variance.
    pub fn complex_gaussian(&mut self) -> Scalar {
        let u1 = self.uniform_open_zero();
        let u2 = self.uniform();
        Scalar::from_polar((-u1.ln()).sqrt(), 2.0 * PI * u2)
    }
}

/// One `N_r × N_t` channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: ComplexMatrix,
}

impl ChannelRealization {
    pub fn n_r(&self) -> usize {
        self.h.rows()
    }

    pub fn n_t(&self) -> usize {
        self.h.cols()
    }
}

/// i.i.d. Rayleigh `H_w`, filled row-major from `stream`.
pub fn sample_hw(n_r: usize, n_t: usize, stream: &mut RandomStream) -> ChannelRealization {
    ChannelRealization {
        h: ComplexMatrix::from_fn(n_r, n_t, |_, _| stream.complex_gaussian()),
    }
}

/// `H = H_w R_t^{1/2}`.
pub fn apply_tx_correlation(hw: &ChannelRealization, r_t: &ComplexMatrix) -> Result<ChannelRealization, LinalgError> {
    if r_t.shape() != (hw.n_t(), hw.n_t()) {
        return Err(LinalgError::Shape {
            op: "apply_tx_correlation",
            left: hw.h.shape(),
            right: r_t.shape(),
        });
    }
    let root = linalg::psd_sqrt(r_t)?;
    Ok(ChannelRealization {
        h: linalg::mat_mul(&hw.h, &root)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_conversion() {
        assert_eq!(snr_linear(0.0), 1.0);
        assert!((snr_linear(30.0) - 1000.0).abs() < 1e-9);
        assert!((snr_linear(10.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = sample_hw(4, 4, &mut RandomStream::new(42, 3));
        let b = sample_hw(4, 4, &mut RandomStream::new(42, 3));
        assert_eq!(a, b);
        assert_eq!(a.h.shape(), (4, 4));
        let c = sample_hw(4, 4, &mut RandomStream::new(42, 4));
        assert_ne!(a, c);
        let d = sample_hw(4, 4, &mut RandomStream::new(43, 3));
        assert_ne!(a, d);
    }

    #[test]
    fn rectangular_shape() {
        let h = sample_hw(2, 5, &mut RandomStream::new(0, 0));
        assert_eq!((h.n_r(), h.n_t()), (2, 5));
    }

    #[test]
    fn uniform_ranges() {
        let mut s = RandomStream::new(9, 0);
        for _ in 0..1000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
            let v = s.uniform_open_zero();
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn identity_correlation_is_exact() {
        let hw = sample_hw(4, 4, &mut RandomStream::new(1, 0));
        let h = apply_tx_correlation(&hw, &ComplexMatrix::identity(4)).unwrap();
        assert_eq!(h, hw);
    }

    #[test]
    fn scalar_correlation_doubles() {
        let hw = sample_hw(3, 2, &mut RandomStream::new(1, 0));
        let h = apply_tx_correlation(&hw, &ComplexMatrix::from_real_diag(&[4.0, 4.0])).unwrap();
        assert!(h.h.max_abs_diff(&hw.h.scale(Scalar::new(2.0, 0.0))) < 1e-14);
    }

    #[test]
    fn correlation_errors() {
        let hw = sample_hw(2, 2, &mut RandomStream::new(1, 0));
        assert!(matches!(
            apply_tx_correlation(&hw, &ComplexMatrix::identity(3)),
            Err(LinalgError::Shape { .. })
        ));
        assert!(matches!(
            apply_tx_correlation(&hw, &ComplexMatrix::from_real_diag(&[1.0, -1.0])),
            Err(LinalgError::NotPsd { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(ChannelConfig::default().validate().is_ok());
        let bad = ChannelConfig { trials: 0, ..Default::default() };
        assert_eq!(bad.validate(), Err(ConfigError::Trials));
        let bad = ChannelConfig { n_r: 0, ..Default::default() };
        assert!(matches!(bad.validate(), Err(ConfigError::Antennas { .. })));
        let bad = ChannelConfig { snr_db: f64::NAN, ..Default::default() };
        assert!(matches!(bad.validate(), Err(ConfigError::Snr(_))));
    }
}
