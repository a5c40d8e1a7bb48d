use thiserror::Error;

/// Errors raised by field, norm and solver operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },
    #[error("invalid time grid: {0}")]
    InvalidTimes(String),
    #[error("time {t} outside of trajectory span [{start}, {end}]")]
    TimeOutOfRange { t: f64, start: f64, end: f64 },
    #[error("dyadic band {j} outside resolvable range [{j_min}, {j_max}]")]
    BandOutOfRange { j: i32, j_min: i32, j_max: i32 },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unbound leaf {0} in term evaluation")]
    UnboundLeaf(String),
    #[error("term limit exceeded: {0}")]
    TermLimit(String),
    #[error("malformed term: {0}")]
    Parse(String),
    #[error("operator refused: {0}")]
    Refused(String),
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
