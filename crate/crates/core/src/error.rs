use std::path::PathBuf;

/// Errors raised by tree construction, search, estimation and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty partition: at least one point is required")]
    EmptyPartition,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is outside the supported range 1..={max}", max = crate::linalg::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("metric is singular: no eigenvalue above the floor")]
    SingularMetric,

    #[error("invalid neighbor count K = {0}")]
    InvalidK(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("image has zero total intensity")]
    ZeroMeasure,

    #[error("degenerate neighborhood: all neighbors coincide with the query")]
    DegenerateNeighborhood,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("I/O failure on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
