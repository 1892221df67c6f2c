//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero-length vector where a direction is required")]
    ZeroVector,
    #[error("quadrance cannot be negative (got {0})")]
    NegativeQuadrance(f64),
    #[error("spread {0} outside [0, 1]")]
    SpreadOutOfRange(f64),
    #[error("cosine sign 0 requires spread exactly 1 (got spread {0})")]
    SignSpreadMismatch(f64),
    #[error("inconsistent triangle: spread law yields spread {0} > 1")]
    InconsistentTriangle(f64),
    #[error("invalid height range: require 0 < min < max")]
    InvalidHeightRange,
    #[error("bearing perpendicular to gravity never meets the ground plane")]
    HorizontalBearing,
    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),
    #[error("image lines are parallel: no finite vanishing point")]
    ParallelLines,
    #[error("vanishing direction is orthogonal to the down hint; sign is ambiguous")]
    AmbiguousSign,
    #[error("point is behind the camera (depth {0})")]
    BehindCamera(f64),
    #[error("unknown landmark id `{0}`")]
    UnknownLandmark(String),
    #[error("observation references landmark `{0}` twice")]
    DuplicateLandmark(String),
    #[error("observation needs exactly one of bearings or pixels+intrinsics")]
    AmbiguousObservation,
    #[error("observation carries neither a gravity vector nor vertical segments")]
    MissingGravity,
    #[error("vertical segments require camera intrinsics to back-project")]
    MissingIntrinsics,
    #[error("image segment endpoints coincide")]
    DegenerateSegment,
    #[error("invalid camera intrinsics: focal lengths must be positive")]
    InvalidIntrinsics,
    #[error("rotation matrix is not orthonormal")]
    InvalidRotation,
    #[error("field has no vertical structures to project")]
    NoVerticals,
    #[error("invalid three-point input: {0}")]
    InvalidP3PInput(&'static str),
    #[error("length mismatch: {predictions} predictions vs {references} references")]
    LengthMismatch {
        predictions: usize,
        references: usize,
    },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    /// True for failures caused by the geometry of the input (degenerate or
    /// unsolvable configurations) rather than by malformed arguments.
    pub fn is_geometric(&self) -> bool {
        matches!(
            self,
            Error::ZeroVector
                | Error::HorizontalBearing
                | Error::Degenerate(_)
                | Error::ParallelLines
                | Error::AmbiguousSign
                | Error::BehindCamera(_)
                | Error::DegenerateSegment
                | Error::InconsistentTriangle(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
