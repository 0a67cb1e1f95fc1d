use thiserror::Error;

/// Errors produced by series construction, estimation, sampling, simulation
/// and ingestion.
#[derive(Debug, Error)]
pub enum Error {
    /// A series (or value sequence) is too short for the requested operation.
    #[error("series '{id}' has {len} measurement(s); at least {min} required")]
    TooShort { id: String, len: usize, min: usize },

    /// Two measurements share the same timestamp.
    #[error("series '{id}' has duplicate timestamp at day {t_days}")]
    DuplicateTimestamp { id: String, t_days: f64 },

    /// A viral load, time offset or log value was negative or non-finite.
    #[error("invalid {what}: {value}")]
    InvalidValue { what: &'static str, value: f64 },

    /// Detection limits below 1 copy/mL would produce negative log values.
    #[error("detection limit must be >= 1 copy/mL and finite, got {limit}")]
    DetectionLimit { limit: f64 },

    /// The requested quadrature method does not apply to this grid.
    #[error("method not applicable: {reason}")]
    MethodInapplicable { reason: String },

    /// A count subsample asked for more points than the series holds.
    #[error("series '{id}' has {available} point(s); cannot subsample to {requested}")]
    InsufficientPoints {
        id: String,
        requested: usize,
        available: usize,
    },

    /// A subsample specification or experiment setup is invalid.
    #[error("invalid subsample spec: {0}")]
    InvalidSpec(String),

    /// Percent change against a zero or negative reference is undefined.
    #[error("percent change undefined for reference median {reference}")]
    UndefinedReference { reference: f64 },

    /// An operation over a cohort or value sequence received no usable input.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// No individual in the cohort satisfied a subsample spec.
    #[error("spec {spec} is infeasible for every individual in the cohort")]
    InfeasibleSpec { spec: String },

    /// Simulation parameters failed validation.
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),

    /// A data file could not be parsed; `line` is 1-based and counts the
    /// header.
    #[error("ingest error at line {line}: {message}")]
    Ingest { line: usize, message: String },

    /// A per-series failure surfaced from a cohort-level operation.
    #[error("series '{id}': {source}")]
    Series {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Tags an error with the individual it arose from, unless it already
    /// names one.
    pub fn for_series(id: &str, err: Error) -> Error {
        match err {
            e @ (Error::TooShort { .. }
            | Error::DuplicateTimestamp { .. }
            | Error::InsufficientPoints { .. }
            | Error::Series { .. }) => e,
            other => Error::Series {
                id: id.to_string(),
                source: Box::new(other),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
