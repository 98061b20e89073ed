//! One-bit key quantization with optional censoring.
//!
//! Real and imaginary parts of each estimate are quantized independently:
//! a positive component becomes bit `0`, anything else bit `1`. Under the
//! censoring scheme Alice drops components with `|x| <= gamma` before
//! quantizing and publishes the dropped indices.

use crate::channel::ChannelObservation;
use crate::{Bits, Error, Result};

/// Key formation scheme with an absolute censoring threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantScheme {
    OneBit,
    Censoring { gamma: f64 },
}

/// Alice's key bits and the bookkeeping Bob needs to align with them.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyMaterial {
    pub bits: Bits,
    /// Strictly increasing component indices that were removed.
    pub censored_indices: Vec<usize>,
    pub scheme: QuantScheme,
    /// Number of real components the key was formed from.
    pub sample_count: usize,
}

impl KeyMaterial {
    /// Indices of the components that produced `bits`, in order.
    pub fn kept_indices(&self) -> Vec<usize> {
        kept_indices(self.sample_count, &self.censored_indices)
    }
}

/// Complement of a sorted censored list within `0..len`.
pub fn kept_indices(len: usize, censored: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(len.saturating_sub(censored.len()));
    let mut c = censored.iter().peekable();
    for i in 0..len {
        if c.peek() == Some(&&i) {
            c.next();
        } else {
            out.push(i);
        }
    }
    out
}

/// `0` if `e > 0`, `1` if `e <= 0`.
pub fn quantize_bit(e: f64) -> Result<u8> {
    if !e.is_finite() {
        return Err(Error::input(format!("cannot quantize non-finite sample {e}")));
    }
    Ok(if e > 0.0 { 0 } else { 1 })
}

/// Whose estimates to read from an observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Alice,
    Bob,
    EveAlice,
    EveBob,
}

/// Interleaves `[Re(x0), Im(x0), Re(x1), Im(x1), ...]` for one side.
pub fn component_stream(observations: &[ChannelObservation], side: Side) -> Result<Vec<f64>> {
    if observations.is_empty() {
        return Err(Error::EmptyBlock);
    }
    Ok(observations
        .iter()
        .flat_map(|o| {
            let x = match side {
                Side::Alice => o.a,
                Side::Bob => o.b,
                Side::EveAlice => o.e_alice,
                Side::EveBob => o.e_bob,
            };
            [x.re, x.im]
        })
        .collect())
}

/// Result of censoring a sample stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Censored {
    /// Surviving `(original index, value)` pairs in order.
    pub kept: Vec<(usize, f64)>,
    pub censored_indices: Vec<usize>,
}

/// Removes every sample with `|value| <= gamma`.
pub fn censor(samples: &[f64], gamma: f64) -> Result<Censored> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::config(format!(
            "censoring threshold must be a non-negative number, got {gamma}"
        )));
    }
    let mut kept = Vec::with_capacity(samples.len());
    let mut censored_indices = Vec::new();
    for (i, &v) in samples.iter().enumerate() {
        if v.abs() <= gamma {
            censored_indices.push(i);
        } else {
            kept.push((i, v));
        }
    }
    Ok(Censored { kept, censored_indices })
}

/// Forms Alice's key from her component stream.
pub fn alice_key(samples: &[f64], scheme: QuantScheme) -> Result<KeyMaterial> {
    let (bits, censored_indices) = match scheme {
        QuantScheme::OneBit => (
            samples.iter().map(|&e| quantize_bit(e)).collect::<Result<Bits>>()?,
            Vec::new(),
        ),
        QuantScheme::Censoring { gamma } => {
            let c = censor(samples, gamma)?;
            let bits = c.kept.iter().map(|&(_, e)| quantize_bit(e)).collect::<Result<Bits>>()?;
            (bits, c.censored_indices)
        }
    };
    Ok(KeyMaterial {
        bits,
        censored_indices,
        scheme,
        sample_count: samples.len(),
    })
}

/// `P(|X| <= gamma)` for `X ~ N(0, variance)`.
pub fn censoring_probability(gamma: f64, variance: f64) -> f64 {
    libm::erf(gamma / (2.0 * variance).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_block, ChannelConfig};
    use crate::rng;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn sign_rule() {
        assert_eq!(quantize_bit(0.73).unwrap(), 0);
        assert_eq!(quantize_bit(-0.5).unwrap(), 1);
        assert_eq!(quantize_bit(0.0).unwrap(), 1);
        assert_eq!(quantize_bit(-0.0).unwrap(), 1);
        assert!(quantize_bit(f64::NAN).is_err());
        assert!(quantize_bit(f64::INFINITY).is_err());
    }

    #[test]
    fn stream_interleaves_components() {
        let z = Complex64::new(0.0, 0.0);
        let o = |a: Complex64| ChannelObservation {
            a,
            b: z,
            e_alice: z,
            e_bob: z,
        };
        let s = component_stream(&[o(Complex64::new(0.3, -0.4))], Side::Alice).unwrap();
        assert_eq!(s, vec![0.3, -0.4]);
        let two = [o(Complex64::new(1.0, 2.0)), o(Complex64::new(3.0, 4.0))];
        assert_eq!(component_stream(&two, Side::Alice).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(component_stream(&two, Side::Bob).unwrap(), vec![0.0; 4]);
        assert!(component_stream(&[], Side::Bob).is_err());
    }

    #[test]
    fn censor_examples() {
        let c = censor(&[0.05, -0.2, 0.3], 0.1).unwrap();
        assert_eq!(c.kept, vec![(1, -0.2), (2, 0.3)]);
        assert_eq!(c.censored_indices, vec![0]);

        let c = censor(&[0.0, 1e-300, -0.0, -2.0], 0.0).unwrap();
        assert_eq!(c.censored_indices, vec![0, 2]);

        assert!(matches!(censor(&[1.0], -0.1), Err(Error::Config(_))));
    }

    #[test]
    fn censored_fraction_of_standard_normal() {
        let mut r = rng::from_seed(17);
        let xs: Vec<f64> = (0..1_000_000).map(|_| StandardNormal.sample(&mut r)).collect();
        let c = censor(&xs, 0.1).unwrap();
        let frac = c.censored_indices.len() as f64 / xs.len() as f64;
        // 1 - 2Q(0.1)
        assert!((frac - 0.079_655_674_554_057_96).abs() < 0.002, "{frac}");
        assert!((censoring_probability(0.1, 1.0) - 0.079_655_674_554_057_96).abs() < 1e-12);
    }

    #[test]
    fn alice_key_examples() {
        let k = alice_key(&[0.3, -0.1], QuantScheme::OneBit).unwrap();
        assert_eq!(k.bits, vec![0, 1]);
        assert!(k.censored_indices.is_empty());

        let k = alice_key(&[0.05, -0.2, 0.3], QuantScheme::Censoring { gamma: 0.1 }).unwrap();
        assert_eq!(k.bits, vec![1, 0]);
        assert_eq!(k.censored_indices, vec![0]);
        assert_eq!(k.kept_indices(), vec![1, 2]);
    }

    #[test]
    fn key_bits_are_unbiased() {
        let cfg = ChannelConfig::from_snr_db(0.5, 10.0).unwrap();
        let obs = sample_block(&cfg, 500_000, &mut rng::from_seed(23)).unwrap();
        let s = component_stream(&obs, Side::Alice).unwrap();
        let k = alice_key(&s, QuantScheme::OneBit).unwrap();
        let ones = k.bits.iter().filter(|&&b| b == 1).count() as f64 / k.bits.len() as f64;
        assert!((ones - 0.5).abs() < 0.005);
    }

    #[test]
    fn censoring_lowers_raw_disagreement() {
        for &snr in &[0.0, 10.0, 20.0] {
            let cfg = ChannelConfig::from_snr_db(0.5, snr).unwrap();
            let obs = sample_block(&cfg, 500_000, &mut rng::from_seed(29)).unwrap();
            let a = component_stream(&obs, Side::Alice).unwrap();
            let b = component_stream(&obs, Side::Bob).unwrap();
            let plain = alice_key(&a, QuantScheme::OneBit).unwrap();
            let bob: Vec<u8> = b.iter().map(|&x| quantize_bit(x).unwrap()).collect();
            let raw = crate::hamming_distance(&plain.bits, &bob) as f64 / a.len() as f64;

            let cens = alice_key(&a, QuantScheme::Censoring { gamma: 0.1 }).unwrap();
            let kept = cens.kept_indices();
            let errs = kept.iter().zip(&cens.bits).filter(|(&i, &bit)| bob[i] != bit).count();
            let cens_rate = errs as f64 / kept.len() as f64;
            assert!(cens_rate < raw, "snr {snr}: {cens_rate} vs {raw}");
        }
    }

    proptest! {
        #[test]
        fn sign_antisymmetry(e in prop::num::f64::NORMAL) {
            prop_assert_eq!(quantize_bit(-e).unwrap(), 1 - quantize_bit(e).unwrap());
        }

        #[test]
        fn censor_partitions_indices(
            xs in prop::collection::vec(-3.0f64..3.0, 0..200),
            gamma in 0.0f64..1.5,
        ) {
            let c = censor(&xs, gamma).unwrap();
            let mut all: Vec<usize> = c.kept.iter().map(|&(i, _)| i).collect();
            prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(c.censored_indices.windows(2).all(|w| w[0] < w[1]));
            all.extend(&c.censored_indices);
            all.sort_unstable();
            prop_assert_eq!(all, (0..xs.len()).collect::<Vec<_>>());
            for &(i, v) in &c.kept {
                prop_assert_eq!(xs[i], v);
            }
        }

        #[test]
        fn censoring_commutes_with_quantization(
            xs in prop::collection::vec(-3.0f64..3.0, 1..200),
            gamma in 0.0f64..1.5,
        ) {
            let key = alice_key(&xs, QuantScheme::Censoring { gamma }).unwrap();
            let all = alice_key(&xs, QuantScheme::OneBit).unwrap();
            let filtered: Vec<u8> = key.kept_indices().iter().map(|&i| all.bits[i]).collect();
            prop_assert_eq!(key.bits.len(), xs.len() - key.censored_indices.len());
            prop_assert_eq!(filtered, key.bits);
        }
    }
}
