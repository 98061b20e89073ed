//! Privacy amplification by hashing the reconciled key.
//!
//! Key bits are packed most-significant-bit first, prefixed with their bit
//! length as an 8-byte big-endian integer, and hashed in counter mode:
//! block `i` is `H(i as u32 BE || header || packed)`. Blocks are concatenated
//! and truncated to the requested length.

use sha1::Sha1;
use sha2::{Digest, Sha256, Sha512};
use subtle::ConstantTimeEq;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HashAlgorithm {
    #[default]
    Sha256,
    Sha512,
    /// Broken; available only through [`HashAlgorithm::from_id`] with
    /// `allow_legacy`.
    Sha1,
}

impl HashAlgorithm {
    pub fn id(&self) -> &'static str {
        match self {
            HashAlgorithm::Sha256 => "sha256",
            HashAlgorithm::Sha512 => "sha512",
            HashAlgorithm::Sha1 => "sha1",
        }
    }

    pub fn from_id(id: &str, allow_legacy: bool) -> Result<Self> {
        match id.to_ascii_lowercase().as_str() {
            "sha256" | "sha-256" => Ok(HashAlgorithm::Sha256),
            "sha512" | "sha-512" => Ok(HashAlgorithm::Sha512),
            "sha1" | "sha-1" if allow_legacy => Ok(HashAlgorithm::Sha1),
            "sha1" | "sha-1" => Err(Error::config(
                "sha1 is a legacy algorithm; enable the legacy flag to use it",
            )),
            other => Err(Error::config(format!("unsupported hash algorithm {other:?}"))),
        }
    }

    fn hash(&self, parts: &[&[u8]]) -> Vec<u8> {
        fn run<D: Digest>(parts: &[&[u8]]) -> Vec<u8> {
            let mut d = D::new();
            for p in parts {
                d.update(p);
            }
            d.finalize().to_vec()
        }
        match self {
            HashAlgorithm::Sha256 => run::<Sha256>(parts),
            HashAlgorithm::Sha512 => run::<Sha512>(parts),
            HashAlgorithm::Sha1 => run::<Sha1>(parts),
        }
    }
}

impl std::fmt::Display for HashAlgorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplifiedKey {
    pub digest: Vec<u8>,
    pub source_bits: usize,
    pub algorithm: HashAlgorithm,
}

impl AmplifiedKey {
    pub fn hex(&self) -> String {
        self.digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Packs bits MSB first; the last byte is zero padded.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b & 1) << (7 - i)))
        })
        .collect()
}

pub fn amplify(key_bits: &[u8], out_bytes: usize, algorithm: HashAlgorithm) -> Result<AmplifiedKey> {
    if key_bits.is_empty() {
        return Err(Error::config("cannot amplify an empty key"));
    }
    if out_bytes == 0 {
        return Err(Error::config("output length must be at least one byte"));
    }
    let header = (key_bits.len() as u64).to_be_bytes();
    let packed = pack_bits(key_bits);
    let mut digest = Vec::with_capacity(out_bytes);
    let mut counter: u32 = 0;
    while digest.len() < out_bytes {
        digest.extend(algorithm.hash(&[&counter.to_be_bytes(), &header, &packed]));
        counter += 1;
    }
    digest.truncate(out_bytes);
    Ok(AmplifiedKey {
        digest,
        source_bits: key_bits.len(),
        algorithm,
    })
}

/// Constant-time comparison of the digests.
pub fn keys_agree(a: &AmplifiedKey, b: &AmplifiedKey) -> bool {
    a.algorithm == b.algorithm && bool::from(a.digest.ct_eq(&b.digest))
}
