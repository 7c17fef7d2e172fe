use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid calibration: {0}")]
    InvalidCalibration(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
    },

    #[error("line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("frame index {got} does not follow {previous}")]
    OutOfOrder { previous: u64, got: u64 },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("no setting trajectory in round")]
    Unclassifiable,

    #[error("malformed round key {0:?}")]
    MalformedRoundKey(String),

    #[error("rotation position {0} outside 1..=6")]
    InvalidPosition(u8),

    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
