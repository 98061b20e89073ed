use super::SparseParityMatrix;
use crate::llr::{hard_decision, LlrVector};
use crate::{Error, Result};

pub const DEFAULT_MAX_ITERS: usize = 50;

/// Bound applied to every message passed along an edge.
pub const MESSAGE_CLIP: f64 = 50.0;

/// Outcome of one decoding run.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    /// All checks satisfied by `bits`.
    pub converged: bool,
    /// Message-passing iterations performed; `0` if the channel decisions
    /// already formed a codeword.
    pub iterations: usize,
    pub posterior_llrs: LlrVector,
}

/// Sum-product decoder with a precomputed edge layout.
///
/// Edges are numbered check by check. Decoding allocates its own message
/// buffers, so one decoder can serve many threads.
#[derive(Debug, Clone)]
pub struct Decoder {
    n: usize,
    /// Edges of check `r` are `row_start[r]..row_start[r + 1]`.
    row_start: Vec<usize>,
    edge_var: Vec<usize>,
    /// Edges of variable `v` are `var_edges[var_start[v]..var_start[v + 1]]`.
    var_start: Vec<usize>,
    var_edges: Vec<usize>,
}

#[inline]
fn clip(x: f64) -> f64 {
    x.clamp(-MESSAGE_CLIP, MESSAGE_CLIP)
}

/// `tanh(x / 2)`.
#[inline]
fn half_tanh(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    ((1.0 - e) / (1.0 + e)).copysign(x)
}

/// `2 atanh(p)`.
#[inline]
fn double_atanh(p: f64) -> f64 {
    ((1.0 + p) / (1.0 - p)).ln()
}

impl Decoder {
    pub fn new(h: &SparseParityMatrix) -> Self {
        let mut row_start = Vec::with_capacity(h.m() + 1);
        let mut edge_var = Vec::with_capacity(h.edge_count());
        row_start.push(0);
        for row in h.rows() {
            edge_var.extend_from_slice(row);
            row_start.push(edge_var.len());
        }
        let mut var_start = vec![0; h.n() + 1];
        for &v in &edge_var {
            var_start[v + 1] += 1;
        }
        for v in 0..h.n() {
            var_start[v + 1] += var_start[v];
        }
        let mut fill = var_start.clone();
        let mut var_edges = vec![0; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v]] = e;
            fill[v] += 1;
        }
        Self {
            n: h.n(),
            row_start,
            edge_var,
            var_start,
            var_edges,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn checks_satisfied(&self, bits: &[u8]) -> bool {
        self.row_start
            .windows(2)
            .all(|w| self.edge_var[w[0]..w[1]].iter().fold(0, |s, &v| s ^ bits[v]) == 0)
    }

    /// Flooding sum-product decoding of `channel` (finite LLRs, length `n`).
    pub fn decode(&self, channel: &[f64], max_iters: usize) -> Result<DecodeResult> {
        if channel.len() != self.n {
            return Err(Error::input(format!(
                "decoder expects {} LLRs, got {}",
                self.n,
                channel.len()
            )));
        }
        if let Some((i, l)) = channel.iter().enumerate().find(|(_, l)| !l.is_finite()) {
            return Err(Error::input(format!("LLR {i} is {l}; saturate before decoding")));
        }
        if max_iters == 0 {
            return Err(Error::config("max_iters must be at least 1"));
        }

        let mut total = channel.to_vec();
        let mut bits: Vec<u8> = total.iter().map(|&l| hard_decision(l)).collect();
        if self.checks_satisfied(&bits) {
            return Ok(self.finish(bits, true, 0, total));
        }

        let edges = self.edge_var.len();
        let mut c2v = vec![0.0f64; edges];
        let mut t = vec![0.0f64; edges];
        let mut suffix = Vec::new();
        for it in 1..=max_iters {
            // Variable to check, then check to variable over each row.
            for r in 0..self.row_start.len() - 1 {
                let (s, e) = (self.row_start[r], self.row_start[r + 1]);
                for k in s..e {
                    let v = self.edge_var[k];
                    t[k] = half_tanh(clip(total[v] - c2v[k]));
                }
                suffix.clear();
                suffix.resize(e - s + 1, 1.0);
                for k in (s..e).rev() {
                    suffix[k - s] = suffix[k - s + 1] * t[k];
                }
                let mut prefix = 1.0;
                for k in s..e {
                    c2v[k] = clip(double_atanh(prefix * suffix[k - s + 1]));
                    prefix *= t[k];
                }
            }
            for v in 0..self.n {
                let sum: f64 = self.var_edges[self.var_start[v]..self.var_start[v + 1]]
                    .iter()
                    .map(|&k| c2v[k])
                    .sum();
                total[v] = channel[v] + sum;
                bits[v] = hard_decision(total[v]);
            }
            if self.checks_satisfied(&bits) {
                return Ok(self.finish(bits, true, it, total));
            }
        }
        Ok(self.finish(bits, false, max_iters, total))
    }

    fn finish(&self, bits: Vec<u8>, converged: bool, iterations: usize, total: Vec<f64>) -> DecodeResult {
        DecodeResult {
            bits,
            converged,
            iterations,
            posterior_llrs: LlrVector::unbounded(total),
        }
    }
}

/// One-shot decode that builds the edge layout on the fly.
pub fn bp_decode(h: &SparseParityMatrix, channel_llrs: &LlrVector, max_iters: usize) -> Result<DecodeResult> {
    Decoder::new(h).decode(&channel_llrs.values, max_iters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::fixtures::{dense, dense_syndrome, hamming74};
    use crate::ldpc::{gallager_construct, prepare_encoder, syndrome};
    use crate::llr::saturate;
    use crate::rng;
    use rand::Rng;

    fn hamming_codebook() -> Vec<Vec<u8>> {
        let d = dense(&hamming74());
        (0u8..128)
            .map(|x| (0..7).map(|i| (x >> i) & 1).collect::<Vec<u8>>())
            .filter(|w| dense_syndrome(&d, w).iter().all(|&s| s == 0))
            .collect()
    }

    /// Codeword maximizing the correlation with `llrs`.
    fn ml_decode(book: &[Vec<u8>], llrs: &[f64]) -> Vec<u8> {
        let score = |w: &Vec<u8>| -> f64 { w.iter().zip(llrs).map(|(&b, &l)| if b == 0 { l } else { -l }).sum() };
        book.iter()
            .max_by(|a, b| score(a).partial_cmp(&score(b)).unwrap())
            .unwrap()
            .clone()
    }

    fn signs(word: &[u8], mag: f64) -> Vec<f64> {
        word.iter().map(|&b| if b == 0 { mag } else { -mag }).collect()
    }

    #[test]
    fn noiseless_input_converges_immediately() {
        let h = hamming74();
        let cw = [1, 0, 0, 0, 1, 1, 1];
        assert!(syndrome(&h, &cw).unwrap().iter().all(|&s| s == 0));
        let r = bp_decode(&h, &LlrVector::unbounded(signs(&cw, 50.0)), DEFAULT_MAX_ITERS).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.bits, cw);
    }

    #[test]
    fn corrects_every_single_error() {
        let h = hamming74();
        let book = hamming_codebook();
        assert_eq!(book.len(), 16);
        let dec = Decoder::new(&h);
        for cw in &book {
            for flip in 0..7 {
                let mut llrs = signs(cw, 8.0);
                llrs[flip] = -llrs[flip].signum() * 2.0;
                assert_eq!(&ml_decode(&book, &llrs), cw);
                let r = dec.decode(&llrs, DEFAULT_MAX_ITERS).unwrap();
                assert!(r.converged);
                assert_eq!(&r.bits, cw, "flip {flip}");
            }
        }
    }

    #[test]
    fn single_flip_touches_column_weight_checks() {
        let h = gallager_construct(60, 3, 6, &mut rng::from_seed(8)).unwrap();
        let mut x = vec![0u8; 60];
        x[17] = 1;
        assert_eq!(syndrome(&h, &x).unwrap().iter().filter(|&&s| s == 1).count(), 3);
    }

    #[test]
    fn zero_llrs_carry_no_information() {
        // Odd row weights, so the all-ones tie decision is not a codeword.
        let h = SparseParityMatrix::from_rows(6, vec![vec![0, 1, 3], vec![1, 2, 4], vec![0, 2, 5]]).unwrap();
        let r = bp_decode(&h, &LlrVector::unbounded(vec![0.0; 6]), 20).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 20);
        assert!(r.posterior_llrs.values.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        let h = hamming74();
        let mut l = vec![1.0; 7];
        l[3] = f64::INFINITY;
        assert!(matches!(
            bp_decode(&h, &LlrVector::unbounded(l), 5),
            Err(Error::Input(_))
        ));
        l = vec![1.0; 7];
        l[0] = f64::NAN;
        assert!(bp_decode(&h, &LlrVector::unbounded(l), 5).is_err());
        assert!(bp_decode(&h, &LlrVector::unbounded(vec![1.0; 6]), 5).is_err());
        assert!(bp_decode(&h, &LlrVector::unbounded(vec![1.0; 7]), 0).is_err());
    }

    #[test]
    fn near_ml_on_hamming() {
        let h = hamming74();
        let book = hamming_codebook();
        let dec = Decoder::new(&h);
        let sent = &book[0];
        let (mut bp_err, mut ml_err) = (0, 0);
        for x in 0u8..128 {
            let rx: Vec<u8> = (0..7).map(|i| (x >> i) & 1).collect();
            let llrs = signs(&rx, 4.0);
            if dec.decode(&llrs, DEFAULT_MAX_ITERS).unwrap().bits != *sent {
                bp_err += 1;
            }
            if ml_decode(&book, &llrs) != *sent {
                ml_err += 1;
            }
        }
        let (bp, ml) = (bp_err as f64 / 128.0, ml_err as f64 / 128.0);
        assert!(bp <= ml + 0.10, "bp {bp} ml {ml}");
    }

    #[test]
    fn idempotent_success() {
        let h = gallager_construct(256, 3, 6, &mut rng::from_seed(12)).unwrap();
        let enc = match prepare_encoder(&h) {
            Ok(e) => e,
            Err(_) => return,
        };
        let mut r = rng::from_seed(13);
        let info: Vec<u8> = (0..enc.k()).map(|_| r.random_range(0..2)).collect();
        let cw = enc.encode(&info).unwrap().codeword;
        let noisy: Vec<f64> = cw
            .iter()
            .map(|&b| (if b == 0 { 1.0 } else { -1.0 }) * 2.5 + r.random_range(-1.5..1.5) * 2.0)
            .collect();
        let dec = Decoder::new(&h);
        let first = dec.decode(&noisy, DEFAULT_MAX_ITERS).unwrap();
        if first.converged {
            let again = dec
                .decode(&saturate(first.posterior_llrs.clone(), 50.0).values, DEFAULT_MAX_ITERS)
                .unwrap();
            assert!(again.converged);
            assert_eq!(again.bits, first.bits);
        }
    }

    #[test]
    fn noiseless_round_trip_on_constructed_codes() {
        let mut r = rng::from_seed(21);
        for (n, wr) in [(512, 6), (1024, 12), (2048, 6), (4096, 6), (2050, 30)] {
            let enc = (0..)
                .find_map(|i| {
                    let h = gallager_construct(n, 3, wr, &mut rng::derive(21, n as u64, i, 1)).unwrap();
                    prepare_encoder(&h).ok()
                })
                .unwrap();
            let dec = Decoder::new(enc.matrix());
            let info: Vec<u8> = (0..enc.k()).map(|_| r.random_range(0..2)).collect();
            let cw = enc.encode(&info).unwrap().codeword;
            let res = dec.decode(&signs(&cw, 50.0), DEFAULT_MAX_ITERS).unwrap();
            assert!(res.converged);
            assert_eq!(enc.split(&res.bits).0, info);
        }
    }
}
