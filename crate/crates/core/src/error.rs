use std::path::PathBuf;

use crate::hsi_io::ColorSpace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("unsupported interleave `{0}` (only bsq is supported)")]
    UnsupportedInterleave(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value at {0}")]
    NonFinite(String),

    #[error("expected a {expected} image, got {found}")]
    WrongColorSpace { expected: ColorSpace, found: ColorSpace },

    #[error(
        "graph component containing pixel {witness} has no color constraint; \
         add pairs in that region or pass a positive ridge"
    )]
    UnconstrainedComponent { witness: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("conjugate gradient breakdown: {0}")]
    SolverBreakdown(String),

    #[error("need at least {needed} point pairs, got {got}")]
    InsufficientPairs { needed: usize, got: usize },

    #[error("degenerate point configuration: {0}")]
    DegenerateGeometry(String),

    #[error("no consensus: best hypothesis had {best} inliers, need at least 4")]
    NoConsensus { best: usize },

    #[error("no sampled pixel maps inside the reference image")]
    AllOutside,

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format { path: path.into(), message: message.into() }
    }
}
