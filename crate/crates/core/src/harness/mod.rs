//! Monte-Carlo sweep driver, analytic oracles, configuration and CSV output.

mod bench;
mod codes;
mod config;
mod csv;
mod oracle;
mod sweep;

pub use bench::{decode_bench, BenchRecord};
pub use codes::{build_code, build_code_pair, feasible_length, CodePair, Rate};
pub use config::{parse_key_values, SweepSettings};
pub use csv::{emit_csv, format_sig, parse_csv, write_csv, CSV_HEADER};
pub use oracle::{
    analytic_raw_disagreement, censored_key_length, measure_raw_disagreement, table1_lengths, RawMeasurement,
    Table1Lengths,
};
pub use sweep::{prepare_codes, run_sweep, run_sweep_with, SchemeKind, SweepConfig, SweepRecord};
