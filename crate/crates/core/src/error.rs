use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("requested {requested} active sources but the library holds only {available}")]
    InsufficientLibrary { requested: usize, available: usize },

    #[error("requested {requested} samples but the library rows hold only {available}")]
    InsufficientSamples { requested: usize, available: usize },

    #[error("frequency band [{lo}, {hi}] Hz is outside (0, {nyquist}) Hz")]
    BandOutOfRange { lo: f64, hi: f64, nyquist: f64 },

    #[error("empty request: {0}")]
    EmptyRequest(&'static str),

    #[error("unknown montage `{0}` (expected std19, egi32, egi64 or egi128)")]
    UnknownMontage(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("only {segments} full segment(s) of {segment_samples} samples fit; at least 2 are required")]
    TooFewSegments { segments: usize, segment_samples: usize },

    #[error("channel `{channel}` has zero power at {freq_hz} Hz")]
    ZeroPowerChannel { channel: String, freq_hz: f64 },

    #[error("band `{0}` contains no frequency bins")]
    EmptyBand(String),

    #[error("record of {n_samples} samples is shorter than one {window_samples}-sample window")]
    TooShort { n_samples: usize, window_samples: usize },

    #[error("envelopes of channels {0} and {1} are constant in every window")]
    DegenerateEnvelope(usize, usize),

    #[error("matrix is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("distribution has zero variance")]
    DegenerateDistribution,

    #[error("weight {value} at index {index} lies outside [0, 1]")]
    RangeViolation { index: usize, value: f64 },

    #[error("series is constant")]
    ConstantSeries,

    #[error("at least 3 points are required, got {0}")]
    TooFewPoints(usize),

    #[error("experiment failed: {failed} of {total} cells failed")]
    ExperimentFailed { failed: usize, total: usize },

    #[error("no usable input data")]
    NoData,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// True for errors caused by bad input data rather than usage or I/O.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::InvalidConfig(_))
    }
}
