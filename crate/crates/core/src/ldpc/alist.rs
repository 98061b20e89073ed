//! alist interchange format.
//!
//! ```text
//! n m
//! max_col_weight max_row_weight
//! <n column weights>
//! <m row weights>
//! <n lines: 1-based check indices of each column, zero padded>
//! <m lines: 1-based column indices of each check, zero padded>
//! ```

use super::SparseParityMatrix;
use crate::{Error, Result};

/// Serializes `h`. Output is canonical: single spaces, sorted indices,
/// zero padding to the maximum weight, `\n` line endings.
pub fn emit_alist(h: &SparseParityMatrix) -> String {
    let cw = h.column_weights();
    let rw = h.row_weights();
    let max_c = cw.iter().copied().max().unwrap_or(0);
    let max_r = rw.iter().copied().max().unwrap_or(0);
    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", h.n(), h.m()));
    out.push_str(&format!("{max_c} {max_r}\n"));
    out.push_str(&join(&mut cw.iter().copied()));
    out.push('\n');
    out.push_str(&join(&mut rw.iter().copied()));
    out.push('\n');
    for (list, width) in h
        .cols()
        .iter()
        .map(|c| (c, max_c))
        .chain(h.rows().iter().map(|r| (r, max_r)))
    {
        let mut it = list
            .iter()
            .map(|&x| x + 1)
            .chain(std::iter::repeat_n(0, width - list.len()));
        out.push_str(&join(&mut it));
        out.push('\n');
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line parsed as integers, with its 1-based number.
    fn next_numbers(&mut self, section: &str) -> Result<(usize, Vec<usize>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line: i + 1,
                        msg: format!("expected a non-negative integer in {section}, found {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((i + 1, nums));
        }
        Err(Error::Parse {
            line: self.last + 1,
            msg: format!("unexpected end of file: missing {section}"),
        })
    }
}

fn expect_len(line: usize, nums: &[usize], want: usize, section: &str) -> Result<()> {
    if nums.len() != want {
        return Err(Error::Parse {
            line,
            msg: format!("{section}: expected {want} values, found {}", nums.len()),
        });
    }
    Ok(())
}

/// Parses an alist document. Column and row lists must describe the same
/// incidence and agree with the declared weights.
pub fn load_alist(text: &str) -> Result<SparseParityMatrix> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (ln, head) = lines.next_numbers("header \"n m\"")?;
    expect_len(ln, &head, 2, "header")?;
    let (n, m) = (head[0], head[1]);
    if n == 0 {
        return Err(Error::Parse {
            line: ln,
            msg: "matrix has no columns".into(),
        });
    }
    let (ln, maxw) = lines.next_numbers("maximum weights")?;
    expect_len(ln, &maxw, 2, "maximum weights")?;
    let (max_c, max_r) = (maxw[0], maxw[1]);

    let (ln, cw) = lines.next_numbers("column weights")?;
    expect_len(ln, &cw, n, "column weights")?;
    if let Some(&w) = cw.iter().find(|&&w| w > max_c) {
        return Err(Error::Parse {
            line: ln,
            msg: format!("column weight {w} exceeds declared maximum {max_c}"),
        });
    }
    let (ln, rw) = lines.next_numbers("row weights")?;
    expect_len(ln, &rw, m, "row weights")?;
    if let Some(&w) = rw.iter().find(|&&w| w > max_r) {
        return Err(Error::Parse {
            line: ln,
            msg: format!("row weight {w} exceeds declared maximum {max_r}"),
        });
    }

    let mut cols = Vec::with_capacity(n);
    for (c, &w) in cw.iter().enumerate() {
        let (ln, nums) = lines.next_numbers("column lists")?;
        cols.push((ln, index_list(ln, &nums, w, max_c, m, &format!("column {}", c + 1))?));
    }
    let mut rows = Vec::with_capacity(m);
    for (r, &w) in rw.iter().enumerate() {
        let (ln, nums) = lines.next_numbers("row lists")?;
        rows.push((ln, index_list(ln, &nums, w, max_r, n, &format!("row {}", r + 1))?));
    }

    let h =
        SparseParityMatrix::from_rows(n, rows.iter().map(|(_, r)| r.clone()).collect()).map_err(|e| Error::Parse {
            line: rows.first().map_or(lines.last, |(l, _)| *l),
            msg: e.to_string(),
        })?;
    for (c, (line, list)) in cols.iter().enumerate() {
        let mut sorted = list.clone();
        sorted.sort_unstable();
        if sorted != h.cols()[c] {
            return Err(Error::Parse {
                line: *line,
                msg: format!("column {} list does not match the row lists", c + 1),
            });
        }
    }
    Ok(h)
}

/// Reads a zero-padded 1-based index list into 0-based indices.
fn index_list(
    line: usize,
    nums: &[usize],
    weight: usize,
    max_weight: usize,
    bound: usize,
    what: &str,
) -> Result<Vec<usize>> {
    if nums.len() < weight || nums.len() > max_weight.max(weight) {
        return Err(Error::Parse {
            line,
            msg: format!(
                "{what}: expected {weight} indices (padded to at most {max_weight}), found {}",
                nums.len()
            ),
        });
    }
    let (used, pad) = nums.split_at(weight);
    if pad.iter().any(|&x| x != 0) {
        return Err(Error::Parse {
            line,
            msg: format!("{what}: weight mismatch, more than {weight} non-zero indices"),
        });
    }
    used.iter()
        .map(|&x| {
            if x == 0 || x > bound {
                Err(Error::Parse {
                    line,
                    msg: format!("{what}: index {x} out of range 1..={bound}"),
                })
            } else {
                Ok(x - 1)
            }
        })
        .collect()
}
