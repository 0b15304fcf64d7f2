//! Growth distance between compact convex sets.
//!
//! The growth distance is the smallest factor by which two convex bodies,
//! scaled about chosen interior center points, must grow (or shrink) until
//! they touch. A value `<= 1` means the bodies intersect, `> 1` means they are
//! separated. The solver only needs support functions, so any convex shape
//! with a support mapping can participate.
//!
//! The computation is posed as a ray-intersection problem on the translated
//! Minkowski difference `C = C1 - C2 + {p}` and solved by refining an inner
//! polytope (vertex form, optimized with a small warm-started simplex) and an
//! outer halfspace bound until their relative gap is below tolerance.
//!
//! ```
//! use growth_distance::prelude::*;
//!
//! let ball = Shape::<3>::sphere(1.0).unwrap();
//! let pair = DifferencePair::new(
//!     &ball, Pose::identity(), CenterSpec::for_shape(&ball).unwrap(),
//!     &ball, Pose::from_translation(Vector::<3>::new(4.0, 0.0, 0.0)),
//!     CenterSpec::for_shape(&ball).unwrap(),
//! ).unwrap();
//! let out = growth_distance(&pair, &Config::default(), None).unwrap();
//! assert!((out.alpha - 2.0).abs() < 1e-7);
//! ```

pub mod geometry;
pub mod growth;
pub mod minkowski;
pub mod oracle;
pub mod simplex;

/// Scalar type used throughout.
pub type Real = f64;

pub use geometry::{
    CenterSpec, GeometryError, Mesh, Pose, Shape, SupportEval, Vector, DEFAULT_HILL_CLIMB_THRESHOLD,
};
pub use growth::{
    collide, growth_distance, growth_distance_traced, CollisionResult, Config, GrowthError,
    GrowthResult, IterationTrace, OuterState, SolverState, Status, Verdict, WarmStartData,
};
pub use minkowski::{DiffSupportEval, DifferencePair};

pub mod prelude {
    pub use crate::geometry::{CenterSpec, Pose, Shape, Vector};
    pub use crate::growth::{collide, growth_distance, Config, Status, Verdict, WarmStartData};
    pub use crate::minkowski::DifferencePair;
}
