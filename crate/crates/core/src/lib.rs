//! Secret-key agreement from reciprocal wireless channel measurements.
//!
//! Alice and Bob observe the same fading gain through independent noise.
//! Alice quantizes her estimates to key bits (optionally censoring samples
//! near the decision threshold), publishes LDPC parity of her key over a
//! BPSK/AWGN link protected by a second LDPC code, and Bob recovers her key
//! by sum-product decoding his soft channel LLRs together with the parity
//! LLRs. A passive eavesdropper with uncorrelated measurements repeats Bob's
//! procedure. The reconciled keys are hashed for privacy amplification.
//!
//! The [`harness`] module drives Monte-Carlo sweeps of bit disagreement
//! versus SNR and emits CSV.
//!
//! SNR throughout is `sigma2_h / sigma2_w`, the ratio of per-component gain
//! variance to per-component noise variance, in dB.

pub mod channel;
pub mod error;
pub mod harness;
pub mod ldpc;
pub mod llr;
pub mod privacy;
pub mod quantize;
pub mod reconcile;
pub mod rng;

pub use error::{Error, Result};

/// Bit vector with one `0`/`1` entry per bit.
pub type Bits = Vec<u8>;

/// Number of positions where two bit slices differ.
pub fn hamming_distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
