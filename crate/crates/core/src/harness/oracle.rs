use super::Rate;
use crate::channel::{db_to_linear, sample_block, ChannelConfig};
use crate::quantize::{alice_key, component_stream, quantize_bit, QuantScheme, Side};
use crate::rng::{self, stream};
use crate::{Error, Result};

/// Sign-disagreement probability of two equi-correlated Gaussians,
/// `arccos(rho) / pi` with `rho = s / (s + 1)`.
pub fn analytic_raw_disagreement(snr_db: f64) -> f64 {
    let s = db_to_linear(snr_db);
    let rho = 1.0 / (1.0 + 1.0 / s);
    rho.clamp(-1.0, 1.0).acos() / std::f64::consts::PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawMeasurement {
    pub probability: f64,
    pub std_error: f64,
    pub components: usize,
}

/// Measures Alice/Bob sign disagreement over `components` real components
/// drawn from the channel simulator.
pub fn measure_raw_disagreement(snr_db: f64, components: usize, sigma2_h: f64, seed: u64) -> Result<RawMeasurement> {
    let cfg = ChannelConfig::from_snr_db(sigma2_h, snr_db)?;
    let mut r = rng::derive(seed, snr_db.to_bits(), 0, stream::ORACLE);
    let obs = sample_block(&cfg, components.div_ceil(2), &mut r)?;
    let a = component_stream(&obs, Side::Alice)?;
    let b = component_stream(&obs, Side::Bob)?;
    let mut errs = 0usize;
    for (&x, &y) in a.iter().zip(&b).take(components) {
        errs += usize::from(quantize_bit(x)? != quantize_bit(y)?);
    }
    let p = errs as f64 / components as f64;
    Ok(RawMeasurement {
        probability: p,
        std_error: (p * (1.0 - p) / components as f64).sqrt(),
        components,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Table1Lengths {
    pub key_length: usize,
    pub revealed_parity: usize,
}

/// Key and parity lengths of an outer code of `block_length` at `rate`.
pub fn table1_lengths(block_length: usize, rate: Rate) -> Result<Table1Lengths> {
    let num = block_length * rate.num() as usize;
    if !num.is_multiple_of(rate.den() as usize) {
        return Err(Error::config(format!(
            "block length {block_length} gives a non-integer key length at rate {rate}"
        )));
    }
    let key_length = num / rate.den() as usize;
    Ok(Table1Lengths {
        key_length,
        revealed_parity: block_length - key_length,
    })
}

/// Bits left after censoring `key_length` components at `snr_db`, measured
/// on one simulated block.
pub fn censored_key_length(
    key_length: usize,
    gamma_fraction: f64,
    snr_db: f64,
    sigma2_h: f64,
    seed: u64,
) -> Result<usize> {
    let cfg = ChannelConfig::from_snr_db(sigma2_h, snr_db)?;
    let mut r = rng::derive(seed, snr_db.to_bits(), key_length as u64, stream::ORACLE);
    let obs = sample_block(&cfg, key_length.div_ceil(2), &mut r)?;
    let mut a = component_stream(&obs, Side::Alice)?;
    a.truncate(key_length);
    let gamma = gamma_fraction * cfg.gain_power();
    Ok(alice_key(&a, QuantScheme::Censoring { gamma })?.bits.len())
}
