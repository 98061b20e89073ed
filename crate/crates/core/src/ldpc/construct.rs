use rand::seq::SliceRandom;
use rand::Rng;

use super::SparseParityMatrix;
use crate::{Error, Result};

const MAX_PASSES: usize = 200;
const SWAP_TRIES: usize = 64;

/// Edge-socket state of a regular bipartite graph under construction.
struct Graph {
    wc: usize,
    /// Check attached to each edge; edge `e` belongs to column `e / wc`.
    edge_row: Vec<usize>,
    row_cols: Vec<Vec<usize>>,
    stamp: Vec<usize>,
    count: Vec<u8>,
    epoch: usize,
}

impl Graph {
    fn col_of(&self, e: usize) -> usize {
        e / self.wc
    }

    fn col_rows(&self, c: usize) -> &[usize] {
        &self.edge_row[c * self.wc..(c + 1) * self.wc]
    }

    fn has_edge(&self, c: usize, r: usize) -> bool {
        self.col_rows(c).contains(&r)
    }

    fn has_duplicate(&self, c: usize) -> bool {
        let rows = self.col_rows(c);
        (0..rows.len()).any(|i| rows[i + 1..].contains(&rows[i]))
    }

    /// Number of other columns sharing two or more checks with `c`.
    fn local_cycles(&mut self, c: usize) -> usize {
        self.epoch += 1;
        let mut cycles = 0;
        for i in 0..self.wc {
            let r = self.edge_row[c * self.wc + i];
            for &c2 in &self.row_cols[r] {
                if c2 == c {
                    continue;
                }
                if self.stamp[c2] != self.epoch {
                    self.stamp[c2] = self.epoch;
                    self.count[c2] = 0;
                }
                self.count[c2] += 1;
                if self.count[c2] == 2 {
                    cycles += 1;
                }
            }
        }
        cycles
    }

    /// Moves edge `e` to check `r2` and edge `f` to check `r`.
    fn swap(&mut self, e: usize, f: usize) {
        let (c, c2) = (self.col_of(e), self.col_of(f));
        let (r, r2) = (self.edge_row[e], self.edge_row[f]);
        self.edge_row[e] = r2;
        self.edge_row[f] = r;
        replace(&mut self.row_cols[r], c, c2);
        replace(&mut self.row_cols[r2], c2, c);
    }

    /// Whether swapping `e` and `f` keeps the graph simple.
    fn swap_is_simple(&self, e: usize, f: usize) -> bool {
        let (c, c2) = (self.col_of(e), self.col_of(f));
        let (r, r2) = (self.edge_row[e], self.edge_row[f]);
        c != c2 && r != r2 && !self.has_edge(c, r2) && !self.has_edge(c2, r)
    }
}

fn replace(v: &mut [usize], from: usize, to: usize) {
    if let Some(x) = v.iter_mut().find(|x| **x == from) {
        *x = to;
    }
}

/// Random regular LDPC matrix with column weight `wc` and row weight `wr`.
///
/// Edge sockets are matched by a random permutation; repeated edges are then
/// removed and 4-cycles broken by degree-preserving edge swaps. 4-cycles that
/// cannot be broken within the swap budget (tiny codes) are left in place.
pub fn gallager_construct<R: Rng + ?Sized>(n: usize, wc: usize, wr: usize, rng: &mut R) -> Result<SparseParityMatrix> {
    if wc < 2 || wr <= wc {
        return Err(Error::Construction(format!(
            "need column weight >= 2 and row weight > column weight, got ({wc}, {wr})"
        )));
    }
    if n == 0 || !(n * wc).is_multiple_of(wr) {
        return Err(Error::Construction(format!(
            "n * wc = {} is not divisible by wr = {wr}",
            n * wc
        )));
    }
    let m = n * wc / wr;
    if m < wc {
        return Err(Error::Construction(format!(
            "only {m} checks for column weight {wc}; n must be at least {wr}"
        )));
    }

    let mut sockets: Vec<usize> = (0..m).flat_map(|r| std::iter::repeat_n(r, wr)).collect();
    sockets.shuffle(rng);
    let mut row_cols = vec![Vec::with_capacity(wr); m];
    for (e, &r) in sockets.iter().enumerate() {
        row_cols[r].push(e / wc);
    }
    let mut g = Graph {
        wc,
        edge_row: sockets,
        row_cols,
        stamp: vec![0; n],
        count: vec![0; n],
        epoch: 0,
    };
    let edges = n * wc;

    // Repeated edges must go for the weights to be exact.
    for _ in 0..MAX_PASSES {
        let mut clean = true;
        for c in 0..n {
            while g.has_duplicate(c) {
                clean = false;
                let rows = g.col_rows(c).to_vec();
                let i = (0..wc).find(|&i| rows[i + 1..].contains(&rows[i])).unwrap_or(0);
                let e = c * wc + i;
                let mut moved = false;
                for _ in 0..SWAP_TRIES {
                    let f = rng.random_range(0..edges);
                    let (c2, r) = (g.col_of(f), g.edge_row[e]);
                    let r2 = g.edge_row[f];
                    if c2 != c && r2 != r && !g.has_edge(c, r2) && !g.has_edge(c2, r) {
                        g.swap(e, f);
                        moved = true;
                        break;
                    }
                }
                if !moved {
                    break;
                }
            }
        }
        if clean {
            break;
        }
    }
    if (0..n).any(|c| g.has_duplicate(c)) {
        return Err(Error::Construction(format!(
            "could not place a simple ({wc}, {wr}) graph on {n} columns"
        )));
    }

    for _ in 0..MAX_PASSES {
        let mut any = false;
        for c in 0..n {
            if g.local_cycles(c) == 0 {
                continue;
            }
            any = true;
            for _ in 0..SWAP_TRIES {
                let e = c * wc + rng.random_range(0..wc);
                let f = rng.random_range(0..edges);
                if !g.swap_is_simple(e, f) {
                    continue;
                }
                let c2 = g.col_of(f);
                let before = g.local_cycles(c) + g.local_cycles(c2);
                g.swap(e, f);
                let after = g.local_cycles(c) + g.local_cycles(c2);
                if after < before {
                    if after == 0 || g.local_cycles(c) == 0 {
                        break;
                    }
                } else {
                    g.swap(e, f);
                }
            }
        }
        if !any {
            break;
        }
    }

    SparseParityMatrix::from_rows(n, g.row_cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn small_regular_code() {
        let h = gallager_construct(12, 3, 6, &mut rng::from_seed(1)).unwrap();
        assert_eq!(h.m(), 6);
        assert_eq!(h.rate(), 0.5);
        assert!(h.column_weights().iter().all(|&w| w == 3));
        assert!(h.row_weights().iter().all(|&w| w == 6));
    }

    #[test]
    fn desk_scale_code_is_regular_and_girth_six() {
        let h = gallager_construct(2048, 3, 6, &mut rng::from_seed(2)).unwrap();
        assert_eq!(h.edge_count(), 6144);
        assert_eq!(h.m(), 1024);
        assert!(h.column_weights().iter().all(|&w| w == 3));
        assert!(h.row_weights().iter().all(|&w| w == 6));
        assert_eq!(h.four_cycles(), 0);
    }

    #[test]
    fn high_rate_code() {
        let h = gallager_construct(2050, 3, 30, &mut rng::from_seed(3)).unwrap();
        assert_eq!(h.m(), 205);
        assert!(h.row_weights().iter().all(|&w| w == 30));
        assert_eq!(h.four_cycles(), 0);
    }

    #[test]
    fn deterministic_for_seed() {
        let a = gallager_construct(600, 3, 6, &mut rng::from_seed(5)).unwrap();
        let b = gallager_construct(600, 3, 6, &mut rng::from_seed(5)).unwrap();
        let c = gallager_construct(600, 3, 6, &mut rng::from_seed(6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn infeasible_shapes() {
        let mut r = rng::from_seed(0);
        assert!(gallager_construct(10, 3, 4, &mut r).is_err());
        assert!(gallager_construct(12, 1, 6, &mut r).is_err());
        assert!(gallager_construct(12, 3, 3, &mut r).is_err());
        assert!(gallager_construct(4, 3, 6, &mut r).is_err());
        assert!(gallager_construct(0, 3, 6, &mut r).is_err());
    }
}
