use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input did not match the expected record layout.
    #[error("{0}")]
    Schema(String),

    /// A fetch failed: network error, bad status or a missing fixture.
    #[error("{0}")]
    Transport(String),

    /// A record parsed but violates a domain invariant (price ordering, duplicate dates).
    #[error("{0}")]
    Invariant(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub fn transport(msg: impl Into<String>) -> Self {
        Error::Transport(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn insufficient(msg: impl Into<String>) -> Self {
        Error::InsufficientData(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category, used as the CLI error prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Schema(_) => "schema",
            Error::Transport(_) => "transport",
            Error::Invariant(_) => "invariant",
            Error::InsufficientData(_) => "insufficient-data",
            Error::DegenerateSeries(_) => "degenerate-series",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit code: 2 schema, 3 transport, 4 insufficient data, 1 otherwise.
    /// Invariant violations in input files are reported as schema errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Invariant(_) => 2,
            Error::Transport(_) => 3,
            Error::InsufficientData(_) => 4,
            _ => 1,
        }
    }
}
