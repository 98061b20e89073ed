use std::path::PathBuf;

use super::codes::Rate;
use super::sweep::{SchemeKind, SweepConfig};
use crate::llr::LlrMethod;
use crate::reconcile::ParityFusion;
use crate::{Error, Result};

/// Parses flat `key = value` text. Blank lines and `#` comments are skipped;
/// keys are returned with `_` normalized to `-`.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("expected key=value, found {line:?}"),
        })?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                msg: "empty key".into(),
            });
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Sweep options as given on the command line or in a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub snr_start: f64,
    pub snr_stop: f64,
    pub snr_step: f64,
    pub out: Option<PathBuf>,
    pub config: SweepConfig,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            snr_start: 0.0,
            snr_stop: 24.0,
            snr_step: 2.0,
            out: None,
            config: SweepConfig::default(),
        }
    }
}

fn list<T>(value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("{key}: cannot parse {value:?}")))
}

impl SweepSettings {
    /// Keys understood by [`apply`](Self::apply).
    pub const KEYS: [&'static str; 16] = [
        "snr-start",
        "snr-stop",
        "snr-step",
        "rates",
        "schemes",
        "llr-methods",
        "block-length",
        "blocks",
        "seed",
        "gamma-fraction",
        "transport-snr",
        "out",
        "threads",
        "max-iters",
        "eve",
        "fusion",
    ];

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let c = &mut self.config;
        match key.replace('_', "-").as_str() {
            "snr-start" => self.snr_start = number(key, value)?,
            "snr-stop" => self.snr_stop = number(key, value)?,
            "snr-step" => self.snr_step = number(key, value)?,
            "rates" => c.outer_rates = list(value, |s| s.parse::<Rate>())?,
            "schemes" => {
                c.schemes = list(value, |s| {
                    SchemeKind::from_name(s).ok_or_else(|| Error::config(format!("unknown scheme {s:?}")))
                })?
            }
            "llr-methods" => {
                c.llr_methods = list(value, |s| {
                    LlrMethod::from_name(s).ok_or_else(|| Error::config(format!("unknown LLR method {s:?}")))
                })?
            }
            "block-length" => c.block_length = number(key, value)?,
            "blocks" => c.blocks_per_point = number(key, value)?,
            "seed" => c.master_seed = number(key, value)?,
            "gamma-fraction" => c.gamma_fraction = number(key, value)?,
            "transport-snr" => {
                c.transport_snr_db = match value {
                    "" | "auto" | "channel" => None,
                    v => Some(number(key, v)?),
                }
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "threads" => c.threads = number(key, value)?,
            "max-iters" => c.max_iters = number(key, value)?,
            "eve" => c.simulate_eve = number(key, value)?,
            "fusion" => {
                c.fusion = match value {
                    "soft" => ParityFusion::Soft,
                    "hard" => ParityFusion::Hard,
                    v => return Err(Error::config(format!("unknown fusion {v:?}"))),
                }
            }
            other => return Err(Error::config(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Inclusive SNR grid from start to stop.
    pub fn snr_grid(&self) -> Result<Vec<f64>> {
        let (a, b, s) = (self.snr_start, self.snr_stop, self.snr_step);
        if !(a.is_finite() && b.is_finite() && s.is_finite()) || s <= 0.0 || b < a {
            return Err(Error::config(format!(
                "invalid SNR range start {a}, stop {b}, step {s}"
            )));
        }
        let count = ((b - a) / s + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| ((a + i as f64 * s) * 1e9).round() / 1e9).collect())
    }

    pub fn to_sweep_config(&self) -> Result<SweepConfig> {
        let cfg = SweepConfig {
            snr_db_list: self.snr_grid()?,
            ..self.config.clone()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let kv = parse_key_values("# sweep\nblocks = 10\n\nllr_methods=proposed # trailing\n").unwrap();
        assert_eq!(
            kv,
            vec![
                ("blocks".to_string(), "10".to_string()),
                ("llr-methods".to_string(), "proposed".to_string())
            ]
        );
        assert!(matches!(
            parse_key_values("blocks 10"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_key_values("a=1\n=2"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn later_values_override() {
        let mut s = SweepSettings::default();
        for (k, v) in parse_key_values("blocks=10\nrates=1/2,9/10\nsnr-stop=4").unwrap() {
            s.apply(&k, &v).unwrap();
        }
        s.apply("blocks", "3").unwrap();
        let cfg = s.to_sweep_config().unwrap();
        assert_eq!(cfg.blocks_per_point, 3);
        assert_eq!(cfg.outer_rates.len(), 2);
        assert_eq!(cfg.snr_db_list, vec![0.0, 2.0, 4.0]);
    }

    #[test]
    fn grids_and_errors() {
        let mut s = SweepSettings::default();
        s.apply("snr-start", "0").unwrap();
        s.apply("snr-stop", "1").unwrap();
        s.apply("snr-step", "0.1").unwrap();
        let g = s.snr_grid().unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        s.apply("snr-step", "0").unwrap();
        assert!(s.snr_grid().is_err());
        assert!(s.apply("schemes", "two_bit").is_err());
        assert!(s.apply("blocks", "many").is_err());
        assert!(s.apply("colour", "red").is_err());
        s.apply("transport-snr", "auto").unwrap();
        assert_eq!(s.config.transport_snr_db, None);
        s.apply("transport_snr", "7.5").unwrap();
        assert_eq!(s.config.transport_snr_db, Some(7.5));
    }
}
