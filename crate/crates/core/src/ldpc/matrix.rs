use crate::{Error, Result};

/// Sparse binary parity-check matrix with `m` checks over `n` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseParityMatrix {
    n: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl SparseParityMatrix {
    /// Builds the matrix from per-check column lists.
    ///
    /// Rows are sorted; out-of-range or duplicate entries are rejected.
    pub fn from_rows(n: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut cols = vec![Vec::new(); n];
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::input(format!("check {r} lists column {} twice", w[0])));
            }
            for &c in row.iter() {
                if c >= n {
                    return Err(Error::input(format!("check {r} references column {c} but n = {n}")));
                }
                cols[c].push(r);
            }
        }
        Ok(Self { n, rows, cols })
    }

    /// Codeword length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Design rate `(n - m) / n`.
    pub fn rate(&self) -> f64 {
        (self.n - self.m()) as f64 / self.n as f64
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        self.cols.iter().map(Vec::len).collect()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    /// Number of column pairs that share two or more checks.
    pub fn four_cycles(&self) -> usize {
        let mut count = 0;
        let mut seen = vec![usize::MAX; self.n];
        let mut shared = vec![0u32; self.n];
        for c in 0..self.n {
            let mut touched = Vec::new();
            for &r in &self.cols[c] {
                for &c2 in &self.rows[r] {
                    if c2 <= c {
                        continue;
                    }
                    if seen[c2] != c {
                        seen[c2] = c;
                        shared[c2] = 0;
                        touched.push(c2);
                    }
                    shared[c2] += 1;
                }
            }
            count += touched.iter().filter(|&&c2| shared[c2] >= 2).count();
        }
        count
    }
}

/// `H x` over GF(2).
pub fn syndrome(h: &SparseParityMatrix, bits: &[u8]) -> Result<Vec<u8>> {
    if bits.len() != h.n() {
        return Err(Error::input(format!(
            "syndrome needs {} bits, got {}",
            h.n(),
            bits.len()
        )));
    }
    Ok(h.rows()
        .iter()
        .map(|row| row.iter().fold(0u8, |s, &c| s ^ (bits[c] & 1)))
        .collect())
}
