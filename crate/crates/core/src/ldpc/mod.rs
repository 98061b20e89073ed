//! Sparse binary LDPC codes.
//!
//! [`SparseParityMatrix`] stores the check/variable adjacency of a
//! parity-check matrix `H`. Codes come from [`gallager_construct`] (random
//! regular codes) or from alist files ([`load_alist`]). A
//! [`SystematicEncoder`] is derived by Gaussian elimination over GF(2), and
//! [`Decoder`] runs flooding log-domain sum-product decoding.

mod alist;
mod construct;
mod decoder;
mod encoder;
mod matrix;

pub use alist::{emit_alist, load_alist};
pub use construct::gallager_construct;
pub use decoder::{bp_decode, DecodeResult, Decoder, DEFAULT_MAX_ITERS, MESSAGE_CLIP};
pub use encoder::{prepare_encoder, Encoded, SystematicEncoder};
pub use matrix::{syndrome, SparseParityMatrix};

use crate::Result;

/// A parity-check matrix together with its encoder and decoder layout.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    encoder: SystematicEncoder,
    decoder: Decoder,
}

impl LdpcCode {
    /// Fails if `matrix` is rank deficient.
    pub fn new(matrix: SparseParityMatrix) -> Result<Self> {
        let encoder = prepare_encoder(&matrix)?;
        let decoder = Decoder::new(&matrix);
        Ok(Self { encoder, decoder })
    }

    pub fn matrix(&self) -> &SparseParityMatrix {
        self.encoder.matrix()
    }

    pub fn encoder(&self) -> &SystematicEncoder {
        &self.encoder
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    /// Codeword length.
    pub fn n(&self) -> usize {
        self.encoder.n()
    }

    /// Information length.
    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    /// Number of parity bits.
    pub fn m(&self) -> usize {
        self.encoder.m()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::SparseParityMatrix;

    /// Parity-check matrix of the (7,4) Hamming code.
    pub fn hamming74() -> SparseParityMatrix {
        SparseParityMatrix::from_rows(7, vec![vec![0, 1, 2, 4], vec![0, 1, 3, 5], vec![0, 2, 3, 6]]).unwrap()
    }

    /// Dense row-major copy for brute-force oracles.
    pub fn dense(h: &SparseParityMatrix) -> Vec<Vec<u8>> {
        h.rows()
            .iter()
            .map(|r| {
                let mut row = vec![0u8; h.n()];
                for &c in r {
                    row[c] = 1;
                }
                row
            })
            .collect()
    }

    pub fn dense_syndrome(h: &[Vec<u8>], x: &[u8]) -> Vec<u8> {
        h.iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a & b).fold(0, |s, v| s ^ v))
            .collect()
    }
}
