//! Slepian-Wolf reconciliation.
//!
//! Alice encodes her key with the outer code and reveals only the parity
//! `p`. The parity travels through a rate-1/2 inner code over BPSK/AWGN;
//! Bob decodes it, concatenates the parity LLRs with LLRs of his own channel
//! measurements and decodes the outer code to recover Alice's key. Eve runs
//! the same decoder on her measurements with Bob's parity LLRs.
//!
//! The key bits occupy the outer encoder's information columns and `p` its
//! parity columns, so `reconcile_key` needs nothing beyond the two LLR
//! vectors.

use std::sync::Arc;

use rand::Rng;

use crate::channel::{bpsk_awgn, bpsk_map, db_to_linear, sample_block, ChannelConfig};
use crate::ldpc::{LdpcCode, SystematicEncoder, DEFAULT_MAX_ITERS};
use crate::llr::{
    hard_decision, llr_bpsk_approx, saturate, ChannelLlrParams, DifferenceVariance, LlrMethod, LlrVector,
    DEFAULT_SATURATION,
};
use crate::quantize::{
    alice_key, censor, censoring_probability, component_stream, kept_indices, quantize_bit, QuantScheme, Side,
};
use crate::{hamming_distance, Bits, Error, Result};

/// Oversampling margin applied to the expected number of observations.
pub const CENSORING_OVERSAMPLE: f64 = 1.25;

/// Key formation scheme. The censoring threshold is a fraction of the mean
/// channel power `E|h|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KeyScheme {
    OneBit,
    Censoring { gamma_fraction: f64 },
}

impl KeyScheme {
    pub fn name(&self) -> &'static str {
        match self {
            KeyScheme::OneBit => "one_bit",
            KeyScheme::Censoring { .. } => "censoring",
        }
    }

    /// Absolute threshold for a given channel.
    pub fn quant_scheme(&self, channel: &ChannelConfig) -> QuantScheme {
        match *self {
            KeyScheme::OneBit => QuantScheme::OneBit,
            KeyScheme::Censoring { gamma_fraction } => QuantScheme::Censoring {
                gamma: gamma_fraction * channel.gain_power(),
            },
        }
    }
}

impl std::fmt::Display for KeyScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What Bob feeds to the outer decoder at the parity positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParityFusion {
    /// Saturated posterior LLRs of the inner decoder.
    #[default]
    Soft,
    /// Inner hard decisions mapped to `±saturation`.
    Hard,
}

#[derive(Debug, Clone)]
pub struct ReconcileConfig {
    /// Slepian-Wolf code; its information length is the key length.
    pub outer: Arc<LdpcCode>,
    /// Transport code for the parity; information length must cover `outer.m()`.
    pub inner: Arc<LdpcCode>,
    pub llr_method: LlrMethod,
    pub scheme: KeyScheme,
    /// BPSK symbol energy.
    pub energy: f64,
    /// Bound applied to every LLR before decoding.
    pub saturation: f64,
    pub max_iters: usize,
    /// Transport channel SNR; `None` uses the key channel's SNR.
    pub transport_snr_db: Option<f64>,
    pub fusion: ParityFusion,
    pub difference_variance: DifferenceVariance,
    /// Skip Eve's decode when only the legitimate link is of interest.
    pub simulate_eve: bool,
}

impl ReconcileConfig {
    pub fn new(outer: Arc<LdpcCode>, inner: Arc<LdpcCode>, llr_method: LlrMethod, scheme: KeyScheme) -> Result<Self> {
        let cfg = Self {
            outer,
            inner,
            llr_method,
            scheme,
            energy: 1.0,
            saturation: DEFAULT_SATURATION,
            max_iters: DEFAULT_MAX_ITERS,
            transport_snr_db: None,
            fusion: ParityFusion::Soft,
            difference_variance: DifferenceVariance::Doubled,
            simulate_eve: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inner.k() < self.outer.m() {
            return Err(Error::config(format!(
                "inner code carries {} bits but the outer code reveals {} parity bits",
                self.inner.k(),
                self.outer.m()
            )));
        }
        if !(self.energy > 0.0 && self.energy.is_finite()) {
            return Err(Error::config(format!("energy must be positive, got {}", self.energy)));
        }
        if !(self.saturation > 0.0 && self.saturation.is_finite()) {
            return Err(Error::config(format!(
                "saturation must be positive, got {}",
                self.saturation
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be at least 1"));
        }
        if let KeyScheme::Censoring { gamma_fraction } = self.scheme {
            if !(gamma_fraction >= 0.0 && gamma_fraction.is_finite()) {
                return Err(Error::config(format!(
                    "gamma fraction must be non-negative, got {gamma_fraction}"
                )));
            }
        }
        Ok(())
    }

    /// Key length per block.
    pub fn key_length(&self) -> usize {
        self.outer.k()
    }

    fn llr_params(&self, channel: &ChannelConfig) -> ChannelLlrParams {
        ChannelLlrParams {
            method: self.llr_method,
            sigma2_w: channel.sigma2_w(),
            energy: self.energy,
            difference_variance: self.difference_variance,
        }
    }
}

/// Parity of Alice's key under the outer code.
pub fn make_side_info(k_a: &[u8], outer: &SystematicEncoder) -> Result<Bits> {
    outer.parity(k_a)
}

/// Parity LLRs as received by Bob.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportedParity {
    pub llrs: LlrVector,
    pub converged: bool,
}

/// Sends `p` through the inner code over BPSK/AWGN and returns the saturated
/// posterior LLRs of the parity bits. `p` is zero padded to the inner
/// information length; padding positions are discarded on output.
pub fn transport_side_info<R: Rng + ?Sized>(
    p: &[u8],
    cfg: &ReconcileConfig,
    sigma2_transport: f64,
    rng: &mut R,
) -> Result<TransportedParity> {
    let inner = &cfg.inner;
    if p.len() > inner.k() {
        return Err(Error::input(format!(
            "{} parity bits exceed the inner information length {}",
            p.len(),
            inner.k()
        )));
    }
    let mut info = p.to_vec();
    info.resize(inner.k(), 0);
    let codeword = inner.encoder().encode(&info)?.codeword;
    let tx = bpsk_map(&codeword, cfg.energy);
    let rx = bpsk_awgn(&tx, cfg.energy, sigma2_transport, rng)?;
    let demod = LlrVector::unbounded(
        rx.iter()
            .map(|&y| llr_bpsk_approx(y, cfg.energy, sigma2_transport))
            .collect(),
    );
    let demod = saturate(demod, cfg.saturation);
    let decoded = inner.decoder().decode(&demod.values, cfg.max_iters)?;
    let (post, _) = inner.encoder().split(&decoded.posterior_llrs.values);
    let values: Vec<f64> = post[..p.len()]
        .iter()
        .map(|&l| match cfg.fusion {
            ParityFusion::Soft => l,
            ParityFusion::Hard if hard_decision(l) == 0 => cfg.saturation,
            ParityFusion::Hard => -cfg.saturation,
        })
        .collect();
    Ok(TransportedParity {
        llrs: saturate(LlrVector::unbounded(values), cfg.saturation),
        converged: decoded.converged,
    })
}

/// Decodes the outer code from channel LLRs at the key positions and parity
/// LLRs at the parity positions. Returns Bob's key and convergence.
pub fn reconcile_key(
    channel_llrs: &LlrVector,
    parity_llrs: &LlrVector,
    outer: &LdpcCode,
    max_iters: usize,
) -> Result<(Bits, bool)> {
    let enc = outer.encoder();
    if channel_llrs.len() != enc.k() || parity_llrs.len() != enc.m() {
        return Err(Error::input(format!(
            "outer code expects {} channel and {} parity LLRs, got {} and {}",
            enc.k(),
            enc.m(),
            channel_llrs.len(),
            parity_llrs.len()
        )));
    }
    let word = enc.assemble(&channel_llrs.values, &parity_llrs.values)?;
    let decoded = outer.decoder().decode(&word, max_iters)?;
    let (key, _) = enc.split(&decoded.bits);
    Ok((key, decoded.converged))
}

/// Everything Alice discloses on the public channel.
#[derive(Debug, Clone, PartialEq)]
pub struct AlicePublic {
    pub parity: Bits,
    /// Censored component indices, empty without censoring.
    pub censored_indices: Vec<usize>,
    /// Number of components the key was drawn from.
    pub sample_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub k_a: Bits,
    pub k_b: Bits,
    /// Eve's reconstruction, `None` if Eve was not simulated.
    pub k_e: Option<Bits>,
    pub disagreements_ab: usize,
    pub disagreements_ae: Option<usize>,
    /// Disagreements of Bob's sign decisions before reconciliation.
    pub raw_disagreements: usize,
    pub outer_converged: bool,
    pub inner_converged: bool,
    pub censored_count: usize,
}

/// Components of Alice's and the other parties' streams long enough to give
/// `k` kept components.
struct Streams {
    alice: Vec<f64>,
    bob: Vec<f64>,
    eve: Vec<f64>,
}

fn draw_streams<R: Rng + ?Sized>(
    channel: &ChannelConfig,
    scheme: QuantScheme,
    k: usize,
    rng: &mut R,
) -> Result<Streams> {
    let target = match scheme {
        QuantScheme::OneBit => k.div_ceil(2),
        QuantScheme::Censoring { gamma } => {
            let p = censoring_probability(gamma, channel.measurement_variance());
            let keep = (1.0 - p).max(1e-3);
            (CENSORING_OVERSAMPLE * (k as f64 / 2.0) / keep).ceil() as usize
        }
    };
    let mut s = Streams {
        alice: Vec::new(),
        bob: Vec::new(),
        eve: Vec::new(),
    };
    let mut batch = target.max(1);
    loop {
        let obs = sample_block(channel, batch, rng)?;
        s.alice.extend(component_stream(&obs, Side::Alice)?);
        s.bob.extend(component_stream(&obs, Side::Bob)?);
        s.eve.extend(component_stream(&obs, Side::EveAlice)?);
        let len = match scheme {
            QuantScheme::OneBit => Some(k),
            QuantScheme::Censoring { gamma } => {
                let c = censor(&s.alice, gamma)?;
                c.kept.get(k.wrapping_sub(1)).map(|&(i, _)| i + 1)
            }
        };
        if let Some(len) = len.filter(|&l| l <= s.alice.len()) {
            s.alice.truncate(len);
            s.bob.truncate(len);
            s.eve.truncate(len);
            return Ok(s);
        }
        batch = (batch / 4).max(16);
    }
}

/// Alice's half of the protocol: her secret key and the public message.
pub fn alice_side(samples: &[f64], scheme: QuantScheme, outer: &LdpcCode) -> Result<(Bits, AlicePublic)> {
    let key = alice_key(samples, scheme)?;
    if key.bits.len() != outer.k() {
        return Err(Error::input(format!(
            "key has {} bits, outer code needs {}",
            key.bits.len(),
            outer.k()
        )));
    }
    let parity = make_side_info(&key.bits, outer.encoder())?;
    let public = AlicePublic {
        parity,
        censored_indices: key.censored_indices,
        sample_count: key.sample_count,
    };
    Ok((key.bits, public))
}

/// Bob's (or Eve's) half: channel LLRs at the kept positions fused with the
/// received parity LLRs.
pub fn receiver_side(
    public: &AlicePublic,
    own_samples: &[f64],
    parity_llrs: &LlrVector,
    params: &ChannelLlrParams,
    cfg: &ReconcileConfig,
) -> Result<(Bits, bool)> {
    if own_samples.len() != public.sample_count {
        return Err(Error::input(format!(
            "receiver has {} samples, Alice used {}",
            own_samples.len(),
            public.sample_count
        )));
    }
    let kept = kept_indices(public.sample_count, &public.censored_indices);
    let channel_llrs = params.llrs_at(own_samples, &kept, cfg.saturation);
    reconcile_key(&channel_llrs, parity_llrs, &cfg.outer, cfg.max_iters)
}

/// One full block of the protocol.
pub fn run_trial<R: Rng + ?Sized>(channel: &ChannelConfig, cfg: &ReconcileConfig, rng: &mut R) -> Result<TrialResult> {
    run_trial_observed(channel, cfg, rng, &mut |_| {})
}

/// [`run_trial`] with a tap on the public channel; `tap` sees every message
/// Alice sends.
pub fn run_trial_observed<R: Rng + ?Sized>(
    channel: &ChannelConfig,
    cfg: &ReconcileConfig,
    rng: &mut R,
    tap: &mut dyn FnMut(&AlicePublic),
) -> Result<TrialResult> {
    cfg.validate()?;
    let scheme = cfg.scheme.quant_scheme(channel);
    let k = cfg.key_length();
    let streams = draw_streams(channel, scheme, k, rng)?;

    let (k_a, public) = alice_side(&streams.alice, scheme, &cfg.outer)?;
    tap(&public);

    let snr_t = cfg.transport_snr_db.unwrap_or_else(|| channel.snr_db());
    let sigma2_t = cfg.energy / db_to_linear(snr_t);
    let transported = transport_side_info(&public.parity, cfg, sigma2_t, rng)?;

    let params = cfg.llr_params(channel);
    let (k_b, outer_converged) = receiver_side(&public, &streams.bob, &transported.llrs, &params, cfg)?;

    let kept = kept_indices(public.sample_count, &public.censored_indices);
    let raw_disagreements = kept
        .iter()
        .zip(&k_a)
        .map(|(&i, &a)| quantize_bit(streams.bob[i]).map(|b| (a != b) as usize))
        .sum::<Result<usize>>()?;

    let k_e = if cfg.simulate_eve {
        Some(receiver_side(&public, &streams.eve, &transported.llrs, &params, cfg)?.0)
    } else {
        None
    };

    Ok(TrialResult {
        disagreements_ab: hamming_distance(&k_a, &k_b),
        disagreements_ae: k_e.as_ref().map(|e| hamming_distance(&k_a, e)),
        raw_disagreements,
        outer_converged,
        inner_converged: transported.converged,
        censored_count: public.censored_indices.len(),
        k_a,
        k_b,
        k_e,
    })
}
