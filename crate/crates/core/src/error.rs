use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: header mismatch, expected `{expected}`, found `{found}`")]
    Header {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("degenerate system: {0}")]
    Degenerate(String),

    #[error("nesting violated: {0}")]
    Nesting(String),

    #[error("constant series: {0}")]
    ConstantSeries(String),

    #[error("not enough observations: need at least 3, have {0}")]
    TooFewObservations(usize),

    #[error("period {0} not present in metrics")]
    PeriodAbsent(String),

    #[error("no country appears in both the roster and the metrics")]
    EmptyIntersection,

    #[error("{} ambiguous affiliation(s), first: `{}`", .0.len(), .0.first().map(String::as_str).unwrap_or(""))]
    Ambiguous(Vec<String>),

    #[error("country sets differ: {0:?}")]
    MismatchedCountries(Vec<String>),

    #[error("degenerate indicator for {0}")]
    DegenerateIndicator(String),

    #[error("http: {0}")]
    Http(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
