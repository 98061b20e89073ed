use rand::Rng;
use rayon::prelude::*;

use crate::channel::{bpsk_awgn, bpsk_map, db_to_linear};
use crate::ldpc::LdpcCode;
use crate::llr::{llr_bpsk_approx, q_function, saturate, LlrVector, DEFAULT_SATURATION};
use crate::rng::{self, stream};
use crate::{hamming_distance, Error, Result};

/// Inner-code performance at one transport SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    /// `E / sigma2` in dB.
    pub snr_db: f64,
    pub info_bits: usize,
    /// Information bit error rate after BP decoding.
    pub coded_ber: f64,
    /// Hard-decision error rate on the same received information symbols.
    pub hard_ber: f64,
    /// `Q(sqrt(E / sigma2))`, the uncoded BPSK error rate.
    pub uncoded_ber: f64,
    pub block_error_prob: f64,
    pub blocks: usize,
}

#[derive(Default, Clone, Copy)]
struct Counts {
    coded: usize,
    hard: usize,
    block: usize,
}

/// Sends random information words through `code` over BPSK/AWGN with unit
/// symbol energy and decodes them with BP from saturated approximate LLRs.
pub fn decode_bench(
    code: &LdpcCode,
    snr_db_list: &[f64],
    blocks: usize,
    max_iters: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<BenchRecord>> {
    if blocks == 0 {
        return Err(Error::config("blocks must be at least 1"));
    }
    if let Some(s) = snr_db_list.iter().find(|s| !s.is_finite()) {
        return Err(Error::config(format!("SNR {s} is not finite")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    let enc = code.encoder();
    let energy = 1.0;
    snr_db_list
        .iter()
        .map(|&snr| {
            let sigma2 = energy / db_to_linear(snr);
            let block = |b: usize| -> Result<Counts> {
                let mut r = rng::derive(seed, snr.to_bits(), b as u64, stream::ORACLE);
                let info: Vec<u8> = (0..enc.k()).map(|_| r.random_range(0..2u8)).collect();
                let cw = enc.encode(&info)?.codeword;
                let rx = bpsk_awgn(&bpsk_map(&cw, energy), energy, sigma2, &mut r)?;
                let llrs = LlrVector::unbounded(rx.iter().map(|&y| llr_bpsk_approx(y, energy, sigma2)).collect());
                let llrs = saturate(llrs, DEFAULT_SATURATION);
                let (rx_info, _) = enc.split(&llrs.hard_decisions());
                let decoded = code.decoder().decode(&llrs.values, max_iters)?;
                let (dec_info, _) = enc.split(&decoded.bits);
                let coded = hamming_distance(&dec_info, &info);
                Ok(Counts {
                    coded,
                    hard: hamming_distance(&rx_info, &info),
                    block: usize::from(coded > 0),
                })
            };
            let counts: Vec<Counts> = pool.install(|| (0..blocks).into_par_iter().map(block).collect::<Result<_>>())?;
            let total = counts.iter().fold(Counts::default(), |a, c| Counts {
                coded: a.coded + c.coded,
                hard: a.hard + c.hard,
                block: a.block + c.block,
            });
            let bits = blocks * enc.k();
            Ok(BenchRecord {
                snr_db: snr,
                info_bits: bits,
                coded_ber: total.coded as f64 / bits as f64,
                hard_ber: total.hard as f64 / bits as f64,
                uncoded_ber: q_function((energy / sigma2).sqrt()),
                block_error_prob: total.block as f64 / blocks as f64,
                blocks,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::build_code;

    #[test]
    fn coding_gain_and_determinism() {
        let code = build_code(512, 3, 6, 4, 0).unwrap();
        let recs = decode_bench(&code, &[-2.0, 4.0], 40, 50, 9, 1).unwrap();
        assert_eq!(recs.len(), 2);
        let (low, high) = (&recs[0], &recs[1]);
        assert_eq!(high.info_bits, 40 * 256);
        assert!(high.coded_ber < high.hard_ber, "{high:?}");
        assert!(low.coded_ber > high.coded_ber);
        assert!((high.hard_ber - high.uncoded_ber).abs() < 0.01, "{high:?}");
        assert_eq!(recs, decode_bench(&code, &[-2.0, 4.0], 40, 50, 9, 3).unwrap());
        assert!(decode_bench(&code, &[1.0], 0, 50, 9, 1).is_err());
    }
}
