use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by series ingestion, graph construction, and the
/// statistical estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("write failed: {0}")]
    Write(#[from] io::Error),

    #[error("{path}, row {row}: cannot parse {cell:?} as a number")]
    BadCell { path: PathBuf, row: u64, cell: String },

    #[error("{path}, row {row}: non-finite value")]
    NonFiniteCell { path: PathBuf, row: u64 },

    #[error("{path}: column {column:?} not found")]
    ColumnNotFound { path: PathBuf, column: String },

    #[error("{path}: {rows} data row(s); a series needs at least 2")]
    TooFewRows { path: PathBuf, rows: usize },

    #[error("a series needs at least 2 values, got {0}")]
    SeriesTooShort(usize),

    #[error("series value at index {0} is not finite")]
    NonFiniteValue(usize),

    #[error("hurst must lie strictly inside (0, 1), got {0}")]
    InvalidHurst(f64),

    #[error("circulant embedding not positive semidefinite for length {length}, hurst {hurst} even after padding")]
    EmbeddingFailed { length: usize, hurst: f64 },

    #[error("slice [{start}, {start}+{len}) invalid for series of length {series_len}")]
    SliceOutOfRange {
        start: usize,
        len: usize,
        series_len: usize,
    },

    #[error("scale {scale} outside [{min}, {max}]")]
    ScaleOutOfRange { scale: usize, min: usize, max: usize },

    #[error("invalid DFA configuration: {0}")]
    BadDfaConfig(String),

    #[error("fluctuation is zero at scale {scale}; series is constant or perfectly linear")]
    DegenerateFluctuation { scale: usize },

    #[error("regression inputs must have equal length >= 3 (got {x} and {y})")]
    BadRegressionInput { x: usize, y: usize },

    #[error("regression input is degenerate: {0}")]
    DegenerateRegression(&'static str),

    #[error("{0} requested edges exceed the {1} possible on {2} nodes")]
    TooManyEdges(usize, usize, usize),

    #[error("window length {0} outside [10, {1}]")]
    BadWindowLength(usize, usize),

    #[error("no window lengths supplied")]
    EmptyLengths,

    #[error("graph has no edges")]
    NoEdges,

    #[error("fewer than {needed} qualifying nodes ({got}) for the clustering-degree relation")]
    TooFewQualifyingNodes { needed: usize, got: usize },

    #[error("{count} values below 1 present; degree distributions need values >= 1")]
    NonPositiveDegrees { count: usize },

    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("tail above k_min = {k_min} has {size} point(s); at least 10 required")]
    TailTooSmall { k_min: f64, size: usize },

    #[error("all {size} tail values are equal; tail exponent undefined")]
    DegenerateTail { size: usize },

    #[error("likelihood optimization did not converge")]
    FitDidNotConverge,

    #[error("bootstrap needs at least 100 replicas, got {0}")]
    TooFewReplicas(usize),

    #[error("{failures} of {replicas} bootstrap replicas failed to refit (limit 5%)")]
    BootstrapUnstable { failures: usize, replicas: usize },
}
