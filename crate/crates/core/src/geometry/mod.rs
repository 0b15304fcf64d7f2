//! Convex shapes and their support mappings.
//!
//! Every shape lives in its own body frame with a canonical centroid at the
//! origin. Poses place shapes in the world; [`Shape::support_posed`] evaluates
//! the support function of the posed set without materializing it.

mod directions;
mod mesh;
mod pose;
mod shape;

pub use directions::unit_directions;
pub use mesh::{ClimbResult, Mesh, MeshError, DEFAULT_HILL_CLIMB_THRESHOLD};
pub use pose::Pose;
pub use shape::{CenterSpec, Shape, SupportEval};

use nalgebra::SVector;
use thiserror::Error;

/// A point or direction in `L`-dimensional Euclidean space.
pub type Vector<const L: usize> = SVector<f64, L>;

/// Heap copy of a square matrix, for decompositions that need a concrete dimension.
pub(crate) fn dense<const L: usize>(m: &nalgebra::SMatrix<f64, L, L>) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_column_slice(L, L, m.as_slice())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("support direction has zero norm")]
    ZeroDirection,
    #[error("invalid shape parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("polytope-family shapes need a caller-supplied inradius bound")]
    MissingInradius,
    #[error("center point is not inside the shape")]
    CenterOutside,
    #[error("hill climbing stalled at value {reached} below the exhaustive maximum {expected}; adjacency is disconnected")]
    DisconnectedAdjacency { reached: f64, expected: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}
