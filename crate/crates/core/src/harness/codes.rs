use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::ldpc::{gallager_construct, LdpcCode};
use crate::rng::{self, stream};
use crate::{Error, Result};

/// Attempts before giving up on drawing a full-rank matrix.
const MAX_ATTEMPTS: u64 = 64;
const INNER_TAG: u64 = 0x1_0000;

/// Outer code rate as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rate {
    num: u32,
    den: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Rate {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::config(format!(
                "rate {num}/{den} must lie strictly between 0 and 1"
            )));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Row weight giving this rate at column weight `wc`, if integral.
    pub fn row_weight(&self, wc: usize) -> Option<usize> {
        let (num, den) = (self.num as usize, self.den as usize);
        (wc * den).is_multiple_of(den - num).then(|| wc * den / (den - num))
    }

    /// Smallest column weight >= 3 with an integral row weight.
    pub fn weights(&self) -> Result<(usize, usize)> {
        (3..=8)
            .find_map(|wc| self.row_weight(wc).map(|wr| (wc, wr)))
            .ok_or_else(|| {
                Error::config(format!(
                    "rate {self} has no regular construction with column weight 3..=8"
                ))
            })
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rate {
    type Err = Error;

    /// Accepts `3/4` or a decimal such as `0.75`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::config(format!("cannot parse rate {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse().map_err(|_| bad())?;
            let den = b.trim().parse().map_err(|_| bad())?;
            return Rate::new(num, den);
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        (2..=1000u32)
            .find_map(|den| {
                let num = (x * den as f64).round();
                ((num / den as f64 - x).abs() < 1e-9).then_some((num as u32, den))
            })
            .ok_or_else(bad)
            .and_then(|(n, d)| Rate::new(n, d))
    }
}

/// Length nearest to `n` (ties towards the longer one) for which a regular
/// `(wc, wr)` matrix exists.
pub fn feasible_length(n: usize, wc: usize, wr: usize) -> usize {
    let ok = |x: usize| x >= wr && (x * wc).is_multiple_of(wr);
    (0..=wr)
        .flat_map(|d| [n + d, n.saturating_sub(d)])
        .find(|&x| ok(x))
        .unwrap_or(wr)
}

/// Draws `(wc, wr)` matrices until one has full rank. Attempt `i` uses the
/// stream `derive(seed, label, i, CODE)`.
pub fn build_code(n: usize, wc: usize, wr: usize, seed: u64, label: u64) -> Result<LdpcCode> {
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let h = gallager_construct(n, wc, wr, &mut rng::derive(seed, label, attempt, stream::CODE))?;
        match LdpcCode::new(h) {
            Ok(code) => return Ok(code),
            Err(e @ Error::RankDeficient { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Construction(format!(
        "no full-rank ({wc}, {wr}) matrix of length {n} in {MAX_ATTEMPTS} attempts (last: {})",
        last.map_or_else(String::new, |e| e.to_string())
    )))
}

/// Outer Slepian-Wolf code and its rate-1/2 transport code.
#[derive(Debug, Clone)]
pub struct CodePair {
    pub rate: Rate,
    pub outer: Arc<LdpcCode>,
    pub inner: Arc<LdpcCode>,
}

impl CodePair {
    /// `(n - m) / n` of the constructed outer code.
    pub fn realized_rate(&self) -> f64 {
        self.outer.rate()
    }
}

/// Builds the code pair for one outer rate near `block_length`.
pub fn build_code_pair(block_length: usize, rate: Rate, seed: u64) -> Result<CodePair> {
    let (wc, wr) = rate.weights()?;
    let n = feasible_length(block_length, wc, wr);
    let label = rng::mix(&[rate.num as u64, rate.den as u64, n as u64]);
    let outer = build_code(n, wc, wr, seed, label)?;
    let inner = build_code(2 * outer.m(), 3, 6, seed, label ^ INNER_TAG)?;
    Ok(CodePair {
        rate,
        outer: Arc::new(outer),
        inner: Arc::new(inner),
    })
}
