use thiserror::Error;

use crate::inversion::RecoveryReport;
use crate::polyspace::DegreeTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("signal and ensemble modes differ")]
    ModeMismatch,
    #[error("operation requires real-mode data")]
    RealModeRequired,
    #[error("projector rank {rank} is invalid for ambient dimension {n}")]
    InvalidRank { rank: usize, n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not symmetric (max deviation {deviation:e})")]
    Asymmetric { deviation: f64 },
    #[error("matrix is not antisymmetric (max deviation {deviation:e})")]
    NotAntisymmetric { deviation: f64 },
    #[error("prolongation degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("prolongation degree must be at least 2, got {0}")]
    DegreeTooLow(usize),
    #[error("quadric set is empty")]
    EmptyQuadrics,
    #[error("expected codimension 1, estimated {0}")]
    CodimNotOne(usize),
    #[error("moment vector is identically zero")]
    ZeroMoment,
    #[error("rank-one structure is ambiguous: top singular value ratio {ratio:.3e} below {required:.3e}")]
    AmbiguousRankOne { ratio: f64, required: f64 },
    #[error("measurement {index} has magnitude {value:e} below the genericity floor")]
    NonGenericMeasurement { index: usize, value: f64 },
    #[error("signal is non-generic for this measurement design: {0}")]
    NonGenericSignal(String),
    #[error("codimension never reached 1 up to degree {max_degree}")]
    NotIdentifiable { max_degree: usize, trace: Vec<DegreeTrace> },
    #[error("null direction is ill-conditioned (gap {:.3e})", .0.singular_gap.unwrap_or(f64::NAN))]
    IllConditioned(Box<RecoveryReport>),
    #[error("scale recovery failed: no positive fit")]
    NonPositiveScale,
    #[error("no multistart run converged")]
    NoConvergedStarts,
    #[error("census dimension {n} exceeds the configured cap {cap}")]
    CensusCap { n: usize, cap: usize },
    #[error("malformed input: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
