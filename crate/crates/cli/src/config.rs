use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

use growth_distance::Config;

/// Instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeClass {
    /// Spheres, ellipsoids, capsules and cylinders.
    CurvedPrimitives,
    /// Vertex-list polytopes sampled on an aspect-10 ellipsoid surface.
    Polytopes,
    /// Convex hull meshes with hill-climbing support.
    Meshes,
    /// Sphere pairs with a closed-form reference value.
    Spheres,
    /// Every kind above plus boxes, mixed per pair.
    Mixed,
}

impl ShapeClass {
    pub fn name(self) -> &'static str {
        match self {
            Self::CurvedPrimitives => "curved-primitives",
            Self::Polytopes => "polytopes",
            Self::Meshes => "meshes",
            Self::Spheres => "spheres",
            Self::Mixed => "mixed",
        }
    }
}

/// Benchmark parameters. Serialized as the JSON header line of record files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub shape_class: ShapeClass,
    pub pairs: usize,
    pub poses_per_pair: usize,
    pub repeats_per_call: usize,
    pub seed: u64,
    /// Shape sizes are log-uniform over this many decades below 0.25 m.
    pub scale_span_decades: f64,
    pub warm_start: bool,
    /// Warm-start displacement: translation as a fraction of each body's
    /// circumradius, rotation in radians.
    pub displacement_frac: f64,
    pub eps_tol: f64,
    pub k_max: usize,
    /// Vertex count for the polytope class.
    pub vertices: usize,
    /// OFF/JSON meshes to use instead of the synthetic pool.
    pub mesh_dir: Option<PathBuf>,
    /// Worker threads; 1 keeps timings undisturbed.
    pub jobs: usize,
    /// Cross-check every hill-climbing result against an exhaustive scan.
    pub verify_mesh_climb: bool,
    /// Collect wall-clock timings. Off for pure correctness sweeps.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let solver = Config::default();
        Self {
            shape_class: ShapeClass::CurvedPrimitives,
            pairs: 1000,
            poses_per_pair: 100,
            repeats_per_call: 100,
            seed: 0,
            scale_span_decades: 2.0,
            warm_start: false,
            displacement_frac: 0.01,
            eps_tol: solver.eps_tol,
            k_max: solver.k_max,
            vertices: 100,
            mesh_dir: None,
            jobs: 1,
            verify_mesh_climb: false,
            timing: true,
        }
    }
}

impl BenchConfig {
    pub fn solver_config(&self) -> Config {
        Config {
            eps_tol: self.eps_tol,
            k_max: self.k_max,
            ..Config::default()
        }
    }

    pub fn header_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
