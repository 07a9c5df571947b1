//! Error type shared by all modules of the crate.

use num_bigint::BigInt;
use thiserror::Error;

/// Everything that can go wrong while constructing or transforming the
/// exact-geometry values of this crate.
///
/// Variants carry the offending data so that diagnostics name the violated
/// invariant (`determinant 25 ≠ 1`, `not mergeable`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector has no ray")]
    ZeroVector,

    #[error("fan needs at least 3 rays, got {0}")]
    TooFewRays(usize),

    #[error("duplicate ray ({0}, {1})")]
    DuplicateRay(BigInt, BigInt),

    #[error("rays not in counterclockwise order: cross(({ax}, {ay}), ({bx}, {by})) = {cross} ≤ 0")]
    NotCounterclockwise {
        ax: BigInt,
        ay: BigInt,
        bx: BigInt,
        by: BigInt,
        cross: BigInt,
    },

    #[error("ray sequence winds the circle more than once")]
    NotSingleLoop,

    #[error("sector facets must be independent and counterclockwise")]
    DegenerateSector,

    #[error("expected {expected} matrices for {expected} sectors, got {got}")]
    MatrixCountMismatch { expected: usize, got: usize },

    #[error("determinant {0} ≠ 1")]
    NotUnimodular(BigInt),

    #[error("matrices disagree on shared ray ({0}, {1})")]
    Discontinuous(BigInt, BigInt),

    #[error("image rays do not form a valid fan: {0}")]
    ImageNotFan(Box<Error>),

    #[error("ray ({0}, {1}) is not the mediant of its neighbours: not mergeable")]
    NotMergeable(BigInt, BigInt),

    #[error("fan is not regular at sector {0}")]
    SectorNotRegular(usize),

    #[error("fan is not regular")]
    FanNotRegular,

    #[error("fine fan does not refine the coarse fan")]
    NotRefinement,

    #[error("fan is not compatible with the map")]
    IncompatibleFan,

    #[error("ray ({0}, {1}) lies outside the sector")]
    RayOutsideSector(BigInt, BigInt),

    #[error("point {0} lies outside the interval")]
    ValueOutsideInterval(String),

    #[error("rotation constructor needs q ≥ 3, got {0}")]
    OrderTooSmall(i64),

    #[error("rotation constructor needs 0 ≤ p < q, got p = {0}")]
    BadRotationNumerator(i64),

    #[error("invalid dyadic map: {0}")]
    InvalidDyadicMap(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
