//! Reciprocal channel measurements.
//!
//! Within one coherence time Alice and Bob see the same circular complex
//! Gaussian gain `h`, each through independent additive noise:
//!
//! ```text
//! a = h + w_a
//! b = h + w_b
//! ```
//!
//! Eve is far enough away that her gains to Alice and Bob are independent of
//! `h` and of each other. A variance `v` for a complex quantity means the real
//! and imaginary parts are each `N(0, v)` and independent.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Variances of the key-source channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    sigma2_h: f64,
    sigma2_w: f64,
}

impl ChannelConfig {
    /// Per-component gain variance of a unit-power channel (`E|h|^2 = 1`).
    pub const UNIT_POWER_SIGMA2_H: f64 = 0.5;

    /// `sigma2_h` must be positive; `sigma2_w` may be zero (noiseless limit).
    pub fn new(sigma2_h: f64, sigma2_w: f64) -> Result<Self> {
        if !(sigma2_h.is_finite() && sigma2_h > 0.0) {
            return Err(Error::config(format!(
                "channel gain variance must be positive, got {sigma2_h}"
            )));
        }
        if !(sigma2_w.is_finite() && sigma2_w >= 0.0) {
            return Err(Error::config(format!(
                "noise variance must be non-negative, got {sigma2_w}"
            )));
        }
        Ok(Self { sigma2_h, sigma2_w })
    }

    /// Builds the config whose `sigma2_h / sigma2_w` equals `snr_db`.
    pub fn from_snr_db(sigma2_h: f64, snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::config(format!("SNR must be finite, got {snr_db}")));
        }
        Self::new(sigma2_h, sigma2_h / db_to_linear(snr_db))
    }

    pub fn sigma2_h(&self) -> f64 {
        self.sigma2_h
    }

    pub fn sigma2_w(&self) -> f64 {
        self.sigma2_w
    }

    /// `10 log10(sigma2_h / sigma2_w)`; `+inf` without noise.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.sigma2_h / self.sigma2_w).log10()
    }

    /// Mean complex gain power `E|h|^2 = 2 sigma2_h`.
    pub fn gain_power(&self) -> f64 {
        2.0 * self.sigma2_h
    }

    /// Variance of one real component of a measurement (`a`, `b` or Eve's).
    pub fn measurement_variance(&self) -> f64 {
        self.sigma2_h + self.sigma2_w
    }

    /// Correlation between matching components of `a` and `b`.
    pub fn correlation(&self) -> f64 {
        self.sigma2_h / self.measurement_variance()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One coherence-time measurement set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelObservation {
    /// Alice's estimate of the Bob-to-Alice channel.
    pub a: Complex64,
    /// Bob's estimate of the Alice-to-Bob channel.
    pub b: Complex64,
    /// Eve's estimate of the Alice-to-Eve channel.
    pub e_alice: Complex64,
    /// Eve's estimate of the Bob-to-Eve channel.
    pub e_bob: Complex64,
}

fn complex_gaussian<R: Rng + ?Sized>(std_dev: f64, rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(std_dev * re, std_dev * im)
}

/// Draws one observation. The gain is drawn first, then Alice's and Bob's
/// noise, then Eve's two gains and two noise terms.
pub fn sample_observation<R: Rng + ?Sized>(cfg: &ChannelConfig, rng: &mut R) -> ChannelObservation {
    let sd_h = cfg.sigma2_h.sqrt();
    let sd_w = cfg.sigma2_w.sqrt();
    let h = complex_gaussian(sd_h, rng);
    let w_a = complex_gaussian(sd_w, rng);
    let w_b = complex_gaussian(sd_w, rng);
    let h_ae = complex_gaussian(sd_h, rng);
    let h_be = complex_gaussian(sd_h, rng);
    let w_ea = complex_gaussian(sd_w, rng);
    let w_eb = complex_gaussian(sd_w, rng);
    ChannelObservation {
        a: h + w_a,
        b: h + w_b,
        e_alice: h_ae + w_ea,
        e_bob: h_be + w_eb,
    }
}

/// Draws `n_samples` independent observations, one per coherence time.
pub fn sample_block<R: Rng + ?Sized>(
    cfg: &ChannelConfig,
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<ChannelObservation>> {
    if n_samples == 0 {
        return Err(Error::EmptyBlock);
    }
    Ok((0..n_samples).map(|_| sample_observation(cfg, rng)).collect())
}

/// Maps bits to BPSK symbols: `0 -> +sqrt(E)`, `1 -> -sqrt(E)`.
pub fn bpsk_map(bits: &[u8], energy: f64) -> Vec<f64> {
    let amp = energy.sqrt();
    bits.iter().map(|&b| if b == 0 { amp } else { -amp }).collect()
}

/// Adds independent `N(0, sigma2)` noise to each BPSK symbol.
pub fn bpsk_awgn<R: Rng + ?Sized>(symbols: &[f64], energy: f64, sigma2: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::config(format!("symbol energy must be positive, got {energy}")));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::config(format!(
            "noise variance must be non-negative, got {sigma2}"
        )));
    }
    let amp = energy.sqrt();
    if let Some((i, s)) = symbols.iter().enumerate().find(|(_, &s)| s != amp && s != -amp) {
        return Err(Error::input(format!(
            "symbol {i} = {s} is not in the BPSK constellation {{+{amp}, -{amp}}}"
        )));
    }
    let sd = sigma2.sqrt();
    Ok(symbols
        .iter()
        .map(|&s| {
            let z: f64 = rng.sample(StandardNormal);
            s + sd * z
        })
        .collect())
}
