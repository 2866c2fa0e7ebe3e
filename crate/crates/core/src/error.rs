//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors raised by construction, validation and solve paths.
///
/// All verification *outcomes* are reported through [`crate::verify::Check`]
/// statuses instead; an `Error` always means the request itself could not be
/// carried out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Mesh file or mesh data failed validation.
    InvalidMesh(String),
    /// A generator was asked for an unsupported kind/dimension combination.
    UnsupportedGenerator(String),
    /// Operation requires a face dimension it does not support.
    BadFaceDimension { expected: String, got: usize },
    /// A face/vertex/simplex id that does not exist in the complex.
    UnknownEntity(String),
    /// Exact linear solve hit a singular matrix; carries the detected rank.
    SingularMatrix { rank: usize },
    /// An exact linear system had no solution.
    InconsistentSystem,
    /// Dimension mismatch between polynomials or between a polynomial and an
    /// integration domain.
    DimensionMismatch { expected: usize, got: usize },
    /// Degrees of freedom were requested for even `k`, where no local dual
    /// basis exists.
    EvenOrderDofs { k: usize },
    /// Boundary degrees of freedom need a mesh with more than one simplex.
    SingleSimplexMesh,
    /// An operation restricted to `d = 2` was called in another dimension.
    NotTwoDimensional { d: usize },
    /// Odd order required (2-D edge machinery).
    EvenOrder { k: usize },
    /// Internal consistency failure; indicates a bug, not bad input.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMesh(msg) => write!(f, "invalid mesh: {msg}"),
            Error::UnsupportedGenerator(msg) => write!(f, "unsupported generator: {msg}"),
            Error::BadFaceDimension { expected, got } => {
                write!(f, "bad face dimension: expected {expected}, got {got}")
            }
            Error::UnknownEntity(msg) => write!(f, "unknown entity: {msg}"),
            Error::SingularMatrix { rank } => {
                write!(f, "singular matrix (rank {rank})")
            }
            Error::InconsistentSystem => write!(f, "inconsistent linear system"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::EvenOrderDofs { k } => write!(
                f,
                "no local dual basis exists for even order k = {k}; degrees of freedom are only provided for odd k"
            ),
            Error::SingleSimplexMesh => write!(
                f,
                "boundary degrees of freedom require a mesh with more than one simplex"
            ),
            Error::NotTwoDimensional { d } => {
                write!(f, "operation requires d = 2, mesh has d = {d}")
            }
            Error::EvenOrder { k } => write!(f, "operation requires odd k, got k = {k}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
