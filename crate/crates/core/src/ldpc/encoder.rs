use super::SparseParityMatrix;
use crate::{Error, Result};

/// Dense GF(2) row packed into 64-bit words.
#[derive(Debug, Clone)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn zeros(len: usize) -> Self {
        BitRow(vec![0; len.div_ceil(64)])
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    /// Parity of `self AND other`.
    fn dot(&self, other: &[u64]) -> u8 {
        let ones: u32 = self.0.iter().zip(other).map(|(a, b)| (a & b).count_ones()).sum();
        (ones & 1) as u8
    }
}

/// Systematic encoder obtained by reducing `H` to row echelon form.
///
/// Pivot columns of the reduced matrix hold parity bits and the remaining
/// columns hold information bits, both in ascending column order. Each parity
/// bit is the GF(2) inner product of one stored mask with the information
/// bits.
#[derive(Debug, Clone)]
pub struct SystematicEncoder {
    matrix: SparseParityMatrix,
    info_cols: Vec<usize>,
    parity_cols: Vec<usize>,
    /// One mask over the information bits per parity bit.
    masks: Vec<BitRow>,
}

/// Output of [`SystematicEncoder::encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    /// Codeword in the column order of `H`.
    pub codeword: Vec<u8>,
    /// Parity bits in [`SystematicEncoder::parity_cols`] order.
    pub parity: Vec<u8>,
}

/// Builds the systematic encoder; fails with [`Error::RankDeficient`] if `H`
/// does not have full row rank over GF(2).
pub fn prepare_encoder(h: &SparseParityMatrix) -> Result<SystematicEncoder> {
    let (n, m) = (h.n(), h.m());
    if m == 0 || m >= n {
        return Err(Error::Construction(format!(
            "parity-check matrix must have 0 < m < n, got m = {m}, n = {n}"
        )));
    }
    let mut rows: Vec<BitRow> = h
        .rows()
        .iter()
        .map(|r| {
            let mut b = BitRow::zeros(n);
            for &c in r {
                b.set(c);
            }
            b
        })
        .collect();

    let mut pivots = Vec::with_capacity(m);
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < m {
        return Err(Error::RankDeficient { rank, expected: m });
    }

    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let info_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let k = info_cols.len();
    let masks = rows
        .iter()
        .map(|row| {
            let mut mask = BitRow::zeros(k);
            for (j, &c) in info_cols.iter().enumerate() {
                if row.get(c) {
                    mask.set(j);
                }
            }
            mask
        })
        .collect();

    Ok(SystematicEncoder {
        matrix: h.clone(),
        info_cols,
        parity_cols: pivots,
        masks,
    })
}

impl SystematicEncoder {
    pub fn matrix(&self) -> &SparseParityMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn k(&self) -> usize {
        self.info_cols.len()
    }

    pub fn m(&self) -> usize {
        self.parity_cols.len()
    }

    /// Columns of `H` carrying information bits, ascending.
    pub fn info_cols(&self) -> &[usize] {
        &self.info_cols
    }

    /// Columns of `H` carrying parity bits, ascending.
    pub fn parity_cols(&self) -> &[usize] {
        &self.parity_cols
    }

    /// Parity bits only.
    pub fn parity(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return Err(Error::input(format!(
                "encoder expects {} information bits, got {}",
                self.k(),
                info.len()
            )));
        }
        let mut packed = BitRow::zeros(self.k());
        for (j, &b) in info.iter().enumerate() {
            if b & 1 == 1 {
                packed.set(j);
            }
        }
        Ok(self.masks.iter().map(|mask| mask.dot(&packed.0)).collect())
    }

    pub fn encode(&self, info: &[u8]) -> Result<Encoded> {
        let parity = self.parity(info)?;
        let mut codeword = vec![0u8; self.n()];
        for (&c, &b) in self.info_cols.iter().zip(info) {
            codeword[c] = b & 1;
        }
        for (&c, &b) in self.parity_cols.iter().zip(&parity) {
            codeword[c] = b;
        }
        Ok(Encoded { codeword, parity })
    }

    /// Splits a length-`n` vector into its information and parity parts.
    pub fn split<T: Copy>(&self, word: &[T]) -> (Vec<T>, Vec<T>) {
        (
            self.info_cols.iter().map(|&c| word[c]).collect(),
            self.parity_cols.iter().map(|&c| word[c]).collect(),
        )
    }

    /// Inverse of [`split`](Self::split).
    pub fn assemble<T: Copy + Default>(&self, info: &[T], parity: &[T]) -> Result<Vec<T>> {
        if info.len() != self.k() || parity.len() != self.m() {
            return Err(Error::input(format!(
                "expected {} information and {} parity values, got {} and {}",
                self.k(),
                self.m(),
                info.len(),
                parity.len()
            )));
        }
        let mut word = vec![T::default(); self.n()];
        for (&c, &v) in self.info_cols.iter().zip(info) {
            word[c] = v;
        }
        for (&c, &v) in self.parity_cols.iter().zip(parity) {
            word[c] = v;
        }
        Ok(word)
    }
}
