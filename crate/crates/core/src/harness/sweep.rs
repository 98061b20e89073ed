use std::collections::BTreeMap;

use rayon::prelude::*;

use super::codes::{build_code_pair, CodePair, Rate};
use crate::channel::ChannelConfig;
use crate::ldpc::DEFAULT_MAX_ITERS;
use crate::llr::LlrMethod;
use crate::reconcile::{run_trial, KeyScheme, ParityFusion, ReconcileConfig};
use crate::rng::{self, stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    OneBit,
    Censoring,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 2] = [SchemeKind::OneBit, SchemeKind::Censoring];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::OneBit => "one_bit",
            SchemeKind::Censoring => "censoring",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn key_scheme(&self, gamma_fraction: f64) -> KeyScheme {
        match self {
            SchemeKind::OneBit => KeyScheme::OneBit,
            SchemeKind::Censoring => KeyScheme::Censoring { gamma_fraction },
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub snr_db_list: Vec<f64>,
    pub schemes: Vec<SchemeKind>,
    pub llr_methods: Vec<LlrMethod>,
    pub outer_rates: Vec<Rate>,
    /// Requested outer length; adjusted per rate to the nearest feasible one.
    pub block_length: usize,
    pub blocks_per_point: usize,
    pub master_seed: u64,
    pub transport_snr_db: Option<f64>,
    /// Censoring threshold as a fraction of `E|h|^2`.
    pub gamma_fraction: f64,
    /// Per-component channel gain variance.
    pub sigma2_h: f64,
    pub max_iters: usize,
    /// Worker threads; `0` uses every available core.
    pub threads: usize,
    pub simulate_eve: bool,
    pub fusion: ParityFusion,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            snr_db_list: (0..=12).map(|i| 2.0 * i as f64).collect(),
            schemes: SchemeKind::ALL.to_vec(),
            llr_methods: vec![LlrMethod::Proposed, LlrMethod::BpskApprox],
            outer_rates: ["1/2", "3/4", "4/5", "9/10"]
                .iter()
                .map(|r| r.parse().expect("static rate"))
                .collect(),
            block_length: 2048,
            blocks_per_point: 200,
            master_seed: 1,
            transport_snr_db: None,
            gamma_fraction: 0.1,
            sigma2_h: ChannelConfig::UNIT_POWER_SIGMA2_H,
            max_iters: DEFAULT_MAX_ITERS,
            threads: 0,
            simulate_eve: true,
            fusion: ParityFusion::Soft,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Error::config(format!("no {what} selected"));
        if self.snr_db_list.is_empty() {
            return Err(empty("SNR values"));
        }
        if self.schemes.is_empty() {
            return Err(empty("schemes"));
        }
        if self.llr_methods.is_empty() {
            return Err(empty("LLR methods"));
        }
        if self.outer_rates.is_empty() {
            return Err(empty("rates"));
        }
        if let Some(s) = self.snr_db_list.iter().find(|s| !s.is_finite()) {
            return Err(Error::config(format!("SNR {s} is not finite")));
        }
        if self.blocks_per_point == 0 {
            return Err(Error::config("blocks per point must be at least 1"));
        }
        if self.block_length == 0 {
            return Err(Error::config("block length must be positive"));
        }
        if !(self.gamma_fraction >= 0.0 && self.gamma_fraction.is_finite()) {
            return Err(Error::config(format!(
                "gamma fraction must be non-negative, got {}",
                self.gamma_fraction
            )));
        }
        if !(self.sigma2_h > 0.0 && self.sigma2_h.is_finite()) {
            return Err(Error::config(format!(
                "sigma2_h must be positive, got {}",
                self.sigma2_h
            )));
        }
        if matches!(self.transport_snr_db, Some(s) if !s.is_finite()) {
            return Err(Error::config("transport SNR must be finite"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be at least 1"));
        }
        Ok(())
    }

    fn sorted<T: Clone + PartialOrd>(v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        out.dedup();
        out
    }
}

/// Aggregated results of one `(snr, rate, scheme, method)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub snr_db: f64,
    pub scheme: SchemeKind,
    pub llr_method: LlrMethod,
    /// Realized rate of the constructed outer code.
    pub outer_rate: f64,
    pub key_length: usize,
    /// Mean censored components per block.
    pub censored_mean: f64,
    pub bit_disagreement_prob: f64,
    pub block_error_prob: f64,
    pub blocks: usize,
    /// `None` when Eve is not simulated.
    pub eve_disagreement_prob: Option<f64>,
}

/// Builds the code pair for every requested rate, failing before any trial.
pub fn prepare_codes(cfg: &SweepConfig) -> Result<Vec<CodePair>> {
    cfg.validate()?;
    SweepConfig::sorted(&cfg.outer_rates)
        .into_iter()
        .map(|rate| build_code_pair(cfg.block_length, rate, cfg.master_seed))
        .collect()
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let codes = prepare_codes(cfg)?;
    run_sweep_with(cfg, &codes)
}

#[derive(Default, Clone, Copy)]
struct Tally {
    dab: usize,
    block_errors: usize,
    dae: usize,
    censored: usize,
}

/// Runs the sweep on codes from [`prepare_codes`].
pub fn run_sweep_with(cfg: &SweepConfig, codes: &[CodePair]) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let by_rate: BTreeMap<Rate, &CodePair> = codes.iter().map(|c| (c.rate, c)).collect();

    struct Cell {
        snr: f64,
        key: u64,
        pair: CodePair,
        scheme: SchemeKind,
        rcfg: ReconcileConfig,
        channel: ChannelConfig,
    }
    let mut cells = Vec::new();
    for &snr in &SweepConfig::sorted(&cfg.snr_db_list) {
        let channel = ChannelConfig::from_snr_db(cfg.sigma2_h, snr)?;
        for rate in SweepConfig::sorted(&cfg.outer_rates) {
            let pair = by_rate
                .get(&rate)
                .ok_or_else(|| Error::config(format!("no code prepared for rate {rate}")))?;
            // Schemes and methods share channel draws within an (snr, rate) pair.
            let key = rng::mix(&[snr.to_bits(), rate.num() as u64, rate.den() as u64]);
            for scheme in SweepConfig::sorted(&cfg.schemes) {
                for method in SweepConfig::sorted(&cfg.llr_methods) {
                    let mut rcfg = ReconcileConfig::new(
                        pair.outer.clone(),
                        pair.inner.clone(),
                        method,
                        scheme.key_scheme(cfg.gamma_fraction),
                    )?;
                    rcfg.max_iters = cfg.max_iters;
                    rcfg.transport_snr_db = cfg.transport_snr_db;
                    rcfg.simulate_eve = cfg.simulate_eve;
                    rcfg.fusion = cfg.fusion;
                    cells.push(Cell {
                        snr,
                        key,
                        pair: (*pair).clone(),
                        scheme,
                        rcfg,
                        channel,
                    });
                }
            }
        }
    }

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.blocks_per_point).map(move |b| (c, b)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    let trial = |&(c, b): &(usize, usize)| -> Result<Tally> {
        let cell = &cells[c];
        let mut r = rng::derive(cfg.master_seed, cell.key, b as u64, stream::TRIAL);
        let t = run_trial(&cell.channel, &cell.rcfg, &mut r)?;
        Ok(Tally {
            dab: t.disagreements_ab,
            block_errors: usize::from(t.disagreements_ab > 0),
            dae: t.disagreements_ae.unwrap_or(0),
            censored: t.censored_count,
        })
    };
    let tallies: Vec<Tally> = pool.install(|| jobs.par_iter().map(trial).collect::<Result<_>>())?;

    let blocks = cfg.blocks_per_point;
    Ok(cells
        .iter()
        .zip(tallies.chunks(blocks))
        .map(|(cell, ts)| {
            let sum = ts.iter().fold(Tally::default(), |a, t| Tally {
                dab: a.dab + t.dab,
                block_errors: a.block_errors + t.block_errors,
                dae: a.dae + t.dae,
                censored: a.censored + t.censored,
            });
            let k = cell.pair.outer.k();
            let bits = (k * blocks) as f64;
            SweepRecord {
                snr_db: cell.snr,
                scheme: cell.scheme,
                llr_method: cell.rcfg.llr_method,
                outer_rate: cell.pair.realized_rate(),
                key_length: k,
                censored_mean: sum.censored as f64 / blocks as f64,
                bit_disagreement_prob: sum.dab as f64 / bits,
                block_error_prob: sum.block_errors as f64 / blocks as f64,
                blocks,
                eve_disagreement_prob: cfg.simulate_eve.then(|| sum.dae as f64 / bits),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(snrs: Vec<f64>) -> SweepConfig {
        SweepConfig {
            snr_db_list: snrs,
            schemes: vec![SchemeKind::OneBit],
            llr_methods: vec![LlrMethod::Proposed],
            outer_rates: vec!["3/4".parse().unwrap()],
            block_length: 512,
            blocks_per_point: 2,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn bookkeeping() {
        let recs = run_sweep(&small(vec![10.0])).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].blocks, 2);
        assert_eq!(recs[0].key_length, 384);
        assert_eq!(recs[0].outer_rate, 0.75);
        assert_eq!(recs[0].censored_mean, 0.0);
    }

    #[test]
    fn ordering_and_validation() {
        let mut cfg = small(vec![12.0, 4.0]);
        cfg.schemes = vec![SchemeKind::Censoring, SchemeKind::OneBit];
        cfg.llr_methods = vec![LlrMethod::BpskApprox, LlrMethod::Proposed];
        let recs = run_sweep(&cfg).unwrap();
        let order: Vec<_> = recs.iter().map(|r| (r.snr_db, r.scheme, r.llr_method)).collect();
        assert_eq!(
            order,
            vec![
                (4.0, SchemeKind::OneBit, LlrMethod::Proposed),
                (4.0, SchemeKind::OneBit, LlrMethod::BpskApprox),
                (4.0, SchemeKind::Censoring, LlrMethod::Proposed),
                (4.0, SchemeKind::Censoring, LlrMethod::BpskApprox),
                (12.0, SchemeKind::OneBit, LlrMethod::Proposed),
                (12.0, SchemeKind::OneBit, LlrMethod::BpskApprox),
                (12.0, SchemeKind::Censoring, LlrMethod::Proposed),
                (12.0, SchemeKind::Censoring, LlrMethod::BpskApprox),
            ]
        );
        for bad in [
            SweepConfig {
                blocks_per_point: 0,
                ..small(vec![1.0])
            },
            SweepConfig {
                gamma_fraction: -0.1,
                ..small(vec![1.0])
            },
            SweepConfig {
                outer_rates: vec![],
                ..small(vec![1.0])
            },
            SweepConfig {
                block_length: 7,
                ..small(vec![1.0])
            },
        ] {
            assert!(run_sweep(&bad).is_err());
        }
    }

    #[test]
    fn probabilities_are_bounded() {
        let mut cfg = small(vec![0.0, 30.0]);
        cfg.schemes = SchemeKind::ALL.to_vec();
        for r in run_sweep(&cfg).unwrap() {
            for p in [
                r.bit_disagreement_prob,
                r.block_error_prob,
                r.eve_disagreement_prob.unwrap(),
            ] {
                assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}
