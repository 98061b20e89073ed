use std::io::Write;
use std::path::Path;

use super::sweep::{SchemeKind, SweepRecord};
use crate::llr::LlrMethod;
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "snr_db",
    "scheme",
    "llr_method",
    "outer_rate",
    "key_length",
    "censored_mean",
    "bit_disagreement_prob",
    "block_error_prob",
    "blocks",
    "eve_disagreement_prob",
];

/// Decimal rendering with six significant digits; zero prints as `0`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let decimals = (5 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn sort_key(r: &SweepRecord) -> (f64, f64, SchemeKind, LlrMethod) {
    (r.snr_db, r.outer_rate, r.scheme, r.llr_method)
}

/// Writes the header and one line per record, ordered by
/// `(snr, rate, scheme, method)`.
pub fn emit_csv<W: Write>(records: &[SweepRecord], destination: W) -> Result<()> {
    let mut sorted: Vec<&SweepRecord> = records.iter().collect();
    sorted.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).expect("finite fields"));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(destination);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in sorted {
        w.write_record([
            r.snr_db.to_string(),
            r.scheme.name().to_string(),
            r.llr_method.name().to_string(),
            r.outer_rate.to_string(),
            r.key_length.to_string(),
            format_sig(r.censored_mean),
            format_sig(r.bit_disagreement_prob),
            format_sig(r.block_error_prob),
            r.blocks.to_string(),
            r.eve_disagreement_prob.map(format_sig).unwrap_or_default(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    emit_csv(records, std::io::BufWriter::new(file))
}

/// Parses text produced by [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header, expected {}", CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |field: &str| Error::Parse {
            line,
            msg: format!("invalid {field}"),
        };
        let num = |i: usize| -> Result<f64> { rec[i].parse().map_err(|_| bad(CSV_HEADER[i])) };
        let count = |i: usize| -> Result<usize> { rec[i].parse().map_err(|_| bad(CSV_HEADER[i])) };
        out.push(SweepRecord {
            snr_db: num(0)?,
            scheme: SchemeKind::from_name(&rec[1]).ok_or_else(|| bad("scheme"))?,
            llr_method: LlrMethod::from_name(&rec[2]).ok_or_else(|| bad("llr_method"))?,
            outer_rate: num(3)?,
            key_length: count(4)?,
            censored_mean: num(5)?,
            bit_disagreement_prob: num(6)?,
            block_error_prob: num(7)?,
            blocks: count(8)?,
            eve_disagreement_prob: if rec[9].is_empty() { None } else { Some(num(9)?) },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(snr: f64, p: f64) -> SweepRecord {
        SweepRecord {
            snr_db: snr,
            scheme: SchemeKind::Censoring,
            llr_method: LlrMethod::BpskApprox,
            outer_rate: 0.75,
            key_length: 1536,
            censored_mean: 141.385,
            bit_disagreement_prob: p,
            block_error_prob: 0.5,
            blocks: 200,
            eve_disagreement_prob: Some(0.500_123_456),
        }
    }

    fn emit(records: &[SweepRecord]) -> String {
        let mut buf = Vec::new();
        emit_csv(records, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(0.5), "0.500000");
        assert_eq!(format_sig(0.000_123_456_78), "0.000123457");
        assert_eq!(format_sig(141.385), "141.385");
        assert_eq!(format_sig(1.0), "1.00000");
        assert_eq!(format_sig(3.2e-7), "0.000000320000");
    }

    #[test]
    fn header_only_and_one_line() {
        assert_eq!(emit(&[]), format!("{}\n", CSV_HEADER.join(",")));
        let text = emit(&[record(3.5, 1e-3)]);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "3.5,censoring,bpsk_approx,0.75,1536,141.385,0.00100000,0.500000,200,0.500123"
        );
    }

    #[test]
    fn round_trip() {
        let mut recs = vec![record(10.0, 0.012_345_678), record(-2.0, 0.0), record(4.0, 0.25)];
        recs[1].eve_disagreement_prob = None;
        let text = emit(&recs);
        let back = parse_csv(&text).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[0].snr_db, -2.0);
        assert_eq!(back[0].eve_disagreement_prob, None);
        assert!((back[2].bit_disagreement_prob / 0.012_345_678 - 1.0).abs() < 5e-6);
        assert_eq!(emit(&back), text);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_csv("a,b\n"), Err(Error::Parse { line: 1, .. })));
        let text = emit(&[record(1.0, 0.1)]).replace("bpsk_approx", "bogus");
        assert!(matches!(parse_csv(&text), Err(Error::Parse { line: 2, .. })));
    }
}
