use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reciprokey::channel::ChannelConfig;
use reciprokey::harness::{
    analytic_raw_disagreement, build_code, build_code_pair, decode_bench, emit_csv, measure_raw_disagreement,
    parse_key_values, prepare_codes, run_sweep_with, write_csv, SchemeKind, SweepSettings,
};
use reciprokey::ldpc::{emit_alist, load_alist, prepare_encoder, DEFAULT_MAX_ITERS};
use reciprokey::llr::LlrMethod;
use reciprokey::privacy::{amplify, keys_agree, HashAlgorithm};
use reciprokey::reconcile::{run_trial, ReconcileConfig};
use reciprokey::{rng, Error};

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "reciprokey",
    version,
    about = "Physical-layer secret key agreement simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Bit disagreement versus SNR for every (rate, scheme, LLR method), as CSV.
    Sweep(SweepArgs),
    /// BER of the rate-1/2 transport code over BPSK/AWGN against hard decisions.
    DecodeBench(BenchArgs),
    /// Analytic raw sign-disagreement probability per SNR.
    Oracle(OracleArgs),
    /// Emit or validate parity-check matrices in alist format.
    Alist {
        #[command(subcommand)]
        action: AlistAction,
    },
    /// One key-agreement trial with privacy-amplified keys in hex.
    Trial(TrialArgs),
}

/// Every flag is optional and overrides the same key from `--config`.
#[derive(Args)]
struct SweepArgs {
    /// Flat `key = value` file using the flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    snr_start: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    snr_stop: Option<String>,
    #[arg(long)]
    snr_step: Option<String>,
    /// Comma-separated outer rates, e.g. `1/2,3/4`.
    #[arg(long)]
    rates: Option<String>,
    /// Comma-separated: one_bit, censoring.
    #[arg(long)]
    schemes: Option<String>,
    /// Comma-separated: proposed, bpsk_approx, bpsk_exact.
    #[arg(long)]
    llr_methods: Option<String>,
    #[arg(long)]
    block_length: Option<String>,
    /// Blocks per (snr, rate, scheme, method) cell.
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Censoring threshold as a fraction of E|h|^2.
    #[arg(long)]
    gamma_fraction: Option<String>,
    /// Transport SNR in dB, or `auto` to follow the channel SNR.
    #[arg(long, allow_hyphen_values = true)]
    transport_snr: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    /// Simulate Eve (`true`/`false`).
    #[arg(long)]
    eve: Option<String>,
    /// Parity LLR fusion: soft or hard.
    #[arg(long)]
    fusion: Option<String>,
}

impl SweepArgs {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("snr-start", &self.snr_start),
            ("snr-stop", &self.snr_stop),
            ("snr-step", &self.snr_step),
            ("rates", &self.rates),
            ("schemes", &self.schemes),
            ("llr-methods", &self.llr_methods),
            ("block-length", &self.block_length),
            ("blocks", &self.blocks),
            ("seed", &self.seed),
            ("gamma-fraction", &self.gamma_fraction),
            ("transport-snr", &self.transport_snr),
            ("out", &self.out),
            ("threads", &self.threads),
            ("max-iters", &self.max_iters),
            ("eve", &self.eve),
            ("fusion", &self.fusion),
        ]
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Code length of the (3, 6) code.
    #[arg(long, default_value_t = 2048)]
    n: usize,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    snr_start: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    snr_stop: f64,
    #[arg(long, default_value_t = 1.0)]
    snr_step: f64,
    #[arg(long, default_value_t = 100)]
    blocks: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    snr_start: f64,
    #[arg(long, default_value_t = 24.0, allow_hyphen_values = true)]
    snr_stop: f64,
    #[arg(long, default_value_t = 2.0)]
    snr_step: f64,
    /// Also measure the disagreement over this many simulated components.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum AlistAction {
    /// Construct a regular (wc, wr) matrix and print it.
    Emit {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        wc: usize,
        #[arg(long)]
        wr: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a file and report its shape, weights and rank.
    Validate { path: PathBuf },
}

#[derive(Args)]
struct TrialArgs {
    #[arg(long, default_value_t = 15.0, allow_hyphen_values = true)]
    snr: f64,
    #[arg(long, default_value = "3/4")]
    rate: String,
    #[arg(long, default_value = "censoring")]
    scheme: String,
    #[arg(long, default_value = "proposed")]
    llr_method: String,
    #[arg(long, default_value_t = 2048)]
    block_length: usize,
    #[arg(long, default_value_t = 0.1)]
    gamma_fraction: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// sha256, sha512, or sha1 (requires --allow-legacy).
    #[arg(long, default_value = "sha256")]
    hash: String,
    #[arg(long)]
    allow_legacy: bool,
    /// Amplified key length in bytes.
    #[arg(long, default_value_t = 32)]
    bytes: usize,
}

fn with_path(path: &std::path::Path) -> impl FnOnce(io::Error) -> io::Error + '_ {
    move |e| io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

fn read(path: &std::path::Path) -> io::Result<String> {
    fs::read_to_string(path).map_err(with_path(path))
}

fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, Error> {
    let mut s = SweepSettings::default();
    (s.snr_start, s.snr_stop, s.snr_step) = (start, stop, step);
    s.snr_grid()
}

fn sweep(args: &SweepArgs) -> Result<(), Error> {
    let mut settings = SweepSettings::default();
    if let Some(path) = &args.config {
        for (k, v) in parse_key_values(&read(path)?)? {
            settings.apply(&k, &v)?;
        }
    }
    for (key, value) in args.flags() {
        if let Some(v) = value {
            settings.apply(key, v)?;
        }
    }
    let cfg = settings.to_sweep_config()?;
    let codes = prepare_codes(&cfg)?;
    let records = run_sweep_with(&cfg, &codes)?;
    match &settings.out {
        Some(path) => write_csv(&records, path).map_err(|e| match e {
            Error::Io(io) => Error::Io(with_path(path)(io)),
            other => other,
        }),
        None => emit_csv(&records, io::stdout().lock()),
    }
}

fn bench(args: &BenchArgs) -> Result<(), Error> {
    let grid = snr_grid(args.snr_start, args.snr_stop, args.snr_step)?;
    let code = build_code(args.n, 3, 6, args.seed, 0)?;
    let recs = decode_bench(&code, &grid, args.blocks, args.max_iters, args.seed, args.threads)?;
    let mut out = io::stdout().lock();
    writeln!(out, "snr_db,info_bits,coded_ber,hard_ber,uncoded_ber,block_error_prob")?;
    for r in recs {
        writeln!(
            out,
            "{},{},{:.6e},{:.6e},{:.6e},{:.6}",
            r.snr_db, r.info_bits, r.coded_ber, r.hard_ber, r.uncoded_ber, r.block_error_prob
        )?;
    }
    Ok(())
}

fn oracle(args: &OracleArgs) -> Result<(), Error> {
    let grid = snr_grid(args.snr_start, args.snr_stop, args.snr_step)?;
    let mut out = io::stdout().lock();
    match args.samples {
        None => writeln!(out, "snr_db,raw_disagreement")?,
        Some(_) => writeln!(out, "snr_db,raw_disagreement,measured,std_error")?,
    }
    for snr in grid {
        let p = analytic_raw_disagreement(snr);
        match args.samples {
            None => writeln!(out, "{snr},{p:.9}")?,
            Some(n) => {
                let m = measure_raw_disagreement(snr, n, ChannelConfig::UNIT_POWER_SIGMA2_H, args.seed)?;
                writeln!(out, "{snr},{p:.9},{:.9},{:.3e}", m.probability, m.std_error)?;
            }
        }
    }
    Ok(())
}

fn alist(action: &AlistAction) -> Result<(), Error> {
    match action {
        AlistAction::Emit { n, wc, wr, seed, out } => {
            let text = emit_alist(build_code(*n, *wc, *wr, *seed, 0)?.matrix());
            match out {
                Some(path) => fs::write(path, text).map_err(with_path(path))?,
                None => io::stdout().lock().write_all(text.as_bytes())?,
            }
        }
        AlistAction::Validate { path } => {
            let h = load_alist(&read(path)?)?;
            let range = |w: Vec<usize>| {
                let (lo, hi) = (
                    w.iter().min().copied().unwrap_or(0),
                    w.iter().max().copied().unwrap_or(0),
                );
                if lo == hi {
                    lo.to_string()
                } else {
                    format!("{lo}..{hi}")
                }
            };
            let mut out = io::stdout().lock();
            writeln!(out, "n = {}, m = {}, edges = {}", h.n(), h.m(), h.edge_count())?;
            writeln!(
                out,
                "column weight {}, row weight {}",
                range(h.column_weights()),
                range(h.row_weights())
            )?;
            writeln!(out, "4-cycle column pairs: {}", h.four_cycles())?;
            match prepare_encoder(&h) {
                Ok(enc) => writeln!(
                    out,
                    "full rank, k = {}, rate {:.4}",
                    enc.k(),
                    enc.k() as f64 / h.n() as f64
                )?,
                Err(e) => writeln!(out, "not encodable: {e}")?,
            }
        }
    }
    Ok(())
}

fn trial(args: &TrialArgs) -> Result<(), Error> {
    let bad = |what: &str, v: &str| Error::Config(format!("unknown {what} {v:?}"));
    let scheme = SchemeKind::from_name(&args.scheme).ok_or_else(|| bad("scheme", &args.scheme))?;
    let method = LlrMethod::from_name(&args.llr_method).ok_or_else(|| bad("LLR method", &args.llr_method))?;
    let hash = HashAlgorithm::from_id(&args.hash, args.allow_legacy)?;
    let pair = build_code_pair(args.block_length, args.rate.parse()?, args.seed)?;
    let cfg = ReconcileConfig::new(pair.outer, pair.inner, method, scheme.key_scheme(args.gamma_fraction))?;
    let channel = ChannelConfig::from_snr_db(ChannelConfig::UNIT_POWER_SIGMA2_H, args.snr)?;
    let t = run_trial(&channel, &cfg, &mut rng::from_seed(args.seed))?;
    let k_e = t.k_e.as_deref().unwrap_or_default();
    let (ka, kb, ke) = (
        amplify(&t.k_a, args.bytes, hash)?,
        amplify(&t.k_b, args.bytes, hash)?,
        amplify(k_e, args.bytes, hash)?,
    );
    let mut out = io::stdout().lock();
    writeln!(out, "key bits {}, censored {}", t.k_a.len(), t.censored_count)?;
    writeln!(
        out,
        "raw disagreements {}, after reconciliation {}",
        t.raw_disagreements, t.disagreements_ab
    )?;
    writeln!(out, "eve disagreements {}", t.disagreements_ae.unwrap_or(0))?;
    writeln!(out, "alice {}", ka.hex())?;
    writeln!(out, "bob   {}", kb.hex())?;
    writeln!(out, "eve   {}", ke.hex())?;
    writeln!(
        out,
        "alice/bob agree: {}, alice/eve agree: {}",
        keys_agree(&ka, &kb),
        keys_agree(&ka, &ke)
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(a) => sweep(a),
        Command::DecodeBench(a) => bench(a),
        Command::Oracle(a) => oracle(a),
        Command::Alist { action } => alist(action),
        Command::Trial(a) => trial(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("reciprokey: {e}");
            ExitCode::from(match e {
                Error::Io(_) => EXIT_IO,
                _ => EXIT_CONFIG,
            })
        }
    }
}
