use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters: variances, thresholds, code shapes, sweep settings.
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed input data: lengths, symbol values, non-finite samples.
    #[error("input error: {0}")]
    Input(String),
    /// A regular code with the requested shape could not be built.
    #[error("construction error: {0}")]
    Construction(String),
    /// The parity-check matrix does not have full row rank.
    #[error("encoder error: parity-check matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    /// An alist document could not be parsed.
    #[error("alist parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty block: at least one sample is required")]
    EmptyBlock,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
