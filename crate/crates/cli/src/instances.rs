//! Deterministic random instances: shapes per pair, then poses per pair.
//!
//! Every pair draws from its own ChaCha8 stream, so pair `i` is the same
//! whatever the pair count or worker split.

use std::path::Path;
use std::sync::Arc;

use nalgebra::{Quaternion, Unit, UnitQuaternion};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use growth_distance::geometry::{CenterSpec, GeometryError, Mesh, MeshError, Pose, Shape, Vector};
use growth_distance::oracle::hull::polytope_inradius;
use growth_distance::DifferencePair;

use crate::config::{BenchConfig, ShapeClass};

/// Largest size parameter of a generated shape, in meters.
pub const MAX_SCALE: f64 = 0.25;
/// Aspect ratio of the ellipsoid that polytope vertices are sampled from.
pub const POLYTOPE_ASPECT: f64 = 10.0;

const MESH_POOL_STREAM: u64 = u64::MAX;
const SYNTHETIC_MESH_COUNT: usize = 27;
const SYNTHETIC_MESH_VERTICES: (usize, usize) = (241, 4516);
const MIXED_MESH_COUNT: usize = 6;
const MIXED_MESH_VERTICES: (usize, usize) = (60, 600);

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("mesh {path}: {source}")]
    Mesh { path: String, source: MeshError },
    #[error("mesh directory {0} holds no .off or .json files")]
    EmptyMeshDir(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("could not sample a polytope containing its center")]
    PolytopeSampling,
}

/// A shape with its center point and the metadata written to records.
#[derive(Debug, Clone)]
pub struct Body {
    pub shape: Arc<Shape<3>>,
    pub center: CenterSpec<3>,
    pub circumradius: f64,
    /// Vertex count for polytopes and meshes, 0 otherwise.
    pub vertices: usize,
}

impl Body {
    pub fn new(shape: Arc<Shape<3>>, center: CenterSpec<3>) -> Self {
        let circumradius = shape.circumradius(&center.center);
        let vertices = match &*shape {
            Shape::Polytope { vertices } => vertices.len(),
            Shape::MeshHull(mesh) => mesh.vertices().len(),
            _ => 0,
        };
        Self {
            shape,
            center,
            circumradius,
            vertices,
        }
    }

    /// Primitive centered at its canonical centroid.
    pub fn primitive(shape: Shape<3>) -> Result<Self, GeometryError> {
        let center = CenterSpec::for_shape(&shape)?;
        Ok(Self::new(Arc::new(shape), center))
    }

    pub fn kind(&self) -> &'static str {
        self.shape.kind()
    }
}

/// Two bodies and the poses they are queried at.
#[derive(Debug, Clone)]
pub struct PairSpec {
    pub id: u64,
    pub body1: Body,
    pub body2: Body,
    pub poses: Vec<(Pose<3>, Pose<3>)>,
    /// Rigidly perturbed copies of `poses`, present in warm-start mode.
    pub displaced: Vec<(Pose<3>, Pose<3>)>,
}

impl PairSpec {
    pub fn pair(&self, pose: usize) -> DifferencePair<'_, 3> {
        let (p1, p2) = self.poses[pose];
        self.pair_at(p1, p2)
    }

    pub fn displaced_pair(&self, pose: usize) -> DifferencePair<'_, 3> {
        let (p1, p2) = self.displaced[pose];
        self.pair_at(p1, p2)
    }

    fn pair_at(&self, pose1: Pose<3>, pose2: Pose<3>) -> DifferencePair<'_, 3> {
        DifferencePair::new(
            &self.body1.shape,
            pose1,
            self.body1.center,
            &self.body2.shape,
            pose2,
            self.body2.center,
        )
        .expect("generated bodies have positive inradius")
    }

    /// Closed-form growth distance when both bodies are spheres.
    pub fn analytic_alpha(&self, pose: usize) -> Option<f64> {
        match (&*self.body1.shape, &*self.body2.shape) {
            (Shape::Sphere { radius: r1 }, Shape::Sphere { radius: r2 }) => {
                let pair = self.pair(pose);
                Some(growth_distance::oracle::sphere_growth_distance(*r1, *r2, pair.p().norm()))
            }
            _ => None,
        }
    }
}

/// Meshes that mesh-class pairs draw from.
#[derive(Debug, Clone)]
pub struct MeshPool {
    pub bodies: Vec<Body>,
}

impl MeshPool {
    /// Convex hulls of random ellipsoid-surface samples with vertex counts
    /// log-spaced over `vertex_range`.
    pub fn synthetic(
        count: usize,
        vertex_range: (usize, usize),
        seed: u64,
        verify_climb: bool,
    ) -> Result<Self, InstanceError> {
        let mut rng = stream(seed, MESH_POOL_STREAM);
        let (lo, hi) = (vertex_range.0 as f64, vertex_range.1 as f64);
        let mut bodies = Vec::with_capacity(count);
        for i in 0..count {
            let t = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            let n = (lo * (hi / lo).powf(t)).round() as usize;
            let scale = log_uniform(&mut rng, 0.2 * MAX_SCALE, MAX_SCALE);
            let axes = Vector::<3>::new(
                scale,
                scale * rng.random_range(0.4..=1.0),
                scale * rng.random_range(0.4..=1.0),
            );
            let points = ellipsoid_surface_points(&mut rng, &axes, n);
            let mesh = Mesh::from_points(&points).map_err(|source| InstanceError::Mesh {
                path: format!("synthetic #{i}"),
                source,
            })?;
            bodies.push(mesh_body(mesh, verify_climb)?);
        }
        Ok(Self { bodies })
    }

    /// Every `.off` and `.json` file in `dir`, sorted by name.
    pub fn load_dir(dir: &Path, verify_climb: bool) -> Result<Self, InstanceError> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("off") || e.eq_ignore_ascii_case("json"))
            })
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(InstanceError::EmptyMeshDir(dir.display().to_string()));
        }
        let bodies = paths
            .iter()
            .map(|p| {
                let mesh = Mesh::load(p).map_err(|source| InstanceError::Mesh {
                    path: p.display().to_string(),
                    source,
                })?;
                mesh_body(mesh, verify_climb)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { bodies })
    }
}

/// Mesh centered at its vertex centroid with the exact hull inradius there.
pub fn mesh_body(mesh: Mesh<3>, verify_climb: bool) -> Result<Body, InstanceError> {
    let mesh = mesh.with_climb_verification(verify_climb);
    let vertices = mesh.vertices();
    let centroid = vertices.iter().sum::<Vector<3>>() / vertices.len() as f64;
    let r = polytope_inradius(vertices, &centroid).unwrap_or(0.0);
    let center = CenterSpec::new(centroid, r.max(0.0))?;
    if r <= 0.0 {
        return Err(GeometryError::CenterOutside.into());
    }
    Ok(Body::new(Arc::new(Shape::mesh(mesh)), center))
}

/// ChaCha8 generator for one stream of a seed.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Log-uniform sample in `[lo, hi]`, endpoints included.
pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let t: f64 = rng.random_range(0.0..=1.0);
    (lo.ln() + t * (hi.ln() - lo.ln())).exp().clamp(lo, hi)
}

/// Range of every primitive size parameter for a decade span.
pub fn parameter_range(scale_span_decades: f64) -> (f64, f64) {
    (MAX_SCALE * 10f64.powf(-scale_span_decades), MAX_SCALE)
}

pub fn random_unit(rng: &mut impl Rng) -> Vector<3> {
    loop {
        let g = Vector::<3>::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = g.norm();
        if n > 1e-12 {
            return g / n;
        }
    }
}

/// Uniformly distributed rotation.
pub fn random_rotation(rng: &mut impl Rng) -> UnitQuaternion<f64> {
    loop {
        let q = Quaternion::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if q.norm() > 1e-12 {
            return UnitQuaternion::from_quaternion(q);
        }
    }
}

/// Points on the surface of the ellipsoid with `semi_axes`.
pub fn ellipsoid_surface_points(rng: &mut impl Rng, semi_axes: &Vector<3>, n: usize) -> Vec<Vector<3>> {
    (0..n).map(|_| random_unit(rng).component_mul(semi_axes)).collect()
}

/// Polytope with `n` vertices on an aspect-10 ellipsoid of largest semi-axis
/// `scale`, resampled until the origin is interior.
pub fn aspect_polytope(rng: &mut impl Rng, n: usize, scale: f64) -> Result<Body, InstanceError> {
    let axes = Vector::<3>::new(scale, scale * rng.random_range(0.1..=1.0), scale / POLYTOPE_ASPECT);
    for _ in 0..1000 {
        let vertices = ellipsoid_surface_points(rng, &axes, n.max(4));
        let r = polytope_inradius(&vertices, &Vector::zeros()).unwrap_or(0.0);
        if r > 1e-3 * axes[2] {
            let center = CenterSpec::new(Vector::zeros(), r)?;
            return Ok(Body::new(Arc::new(Shape::polytope(vertices)?), center));
        }
    }
    Err(InstanceError::PolytopeSampling)
}

fn curved_primitive(rng: &mut impl Rng, lo: f64, hi: f64) -> Result<Body, GeometryError> {
    let kind = rng.random_range(0..4);
    let mut size = || log_uniform(rng, lo, hi);
    let shape = match kind {
        0 => Shape::sphere(size())?,
        1 => Shape::ellipsoid(Vector::<3>::new(size(), size(), size()))?,
        2 => Shape::capsule(size(), size())?,
        _ => Shape::cylinder(size(), size())?,
    };
    Body::primitive(shape)
}

fn mixed_body(rng: &mut impl Rng, lo: f64, hi: f64, pool: &MeshPool) -> Result<Body, InstanceError> {
    Ok(match rng.random_range(0..7) {
        0..=3 => curved_primitive(rng, lo, hi)?,
        4 => {
            let h = Vector::<3>::from_fn(|_, _| log_uniform(rng, lo, hi));
            Body::primitive(Shape::cuboid(h)?)?
        }
        5 => {
            let n = rng.random_range(8..=64);
            let s = log_uniform(rng, lo, hi);
            aspect_polytope(rng, n, s)?
        }
        _ => pool.bodies[rng.random_range(0..pool.bodies.len())].clone(),
    })
}

fn random_body(
    class: ShapeClass,
    rng: &mut impl Rng,
    config: &BenchConfig,
    pool: Option<&MeshPool>,
) -> Result<Body, InstanceError> {
    let (lo, hi) = parameter_range(config.scale_span_decades);
    Ok(match class {
        ShapeClass::CurvedPrimitives => curved_primitive(rng, lo, hi)?,
        ShapeClass::Spheres => Body::primitive(Shape::sphere(log_uniform(rng, lo, hi))?)?,
        ShapeClass::Polytopes => {
            let s = log_uniform(rng, lo, hi);
            aspect_polytope(rng, config.vertices, s)?
        }
        ShapeClass::Meshes => {
            let pool = pool.expect("mesh pool built for mesh class");
            pool.bodies[rng.random_range(0..pool.bodies.len())].clone()
        }
        ShapeClass::Mixed => mixed_body(rng, lo, hi, pool.expect("mesh pool built for mixed class"))?,
    })
}

/// Random pose pair. Body 2 sits in a box of half-size `R1 + R2` around body
/// 1, so about half of sphere pairs overlap.
pub fn random_poses(rng: &mut impl Rng, r1: f64, r2: f64) -> (Pose<3>, Pose<3>) {
    let h = r1 + r2;
    let mut uniform_box = || Vector::<3>::from_fn(|_, _| rng.random_range(-h..=h));
    let t1 = uniform_box();
    let t2 = t1 + uniform_box();
    let q1 = random_rotation(rng);
    let q2 = random_rotation(rng);
    (Pose::from_quaternion(&q1, t1), Pose::from_quaternion(&q2, t2))
}

/// Moves a pose by `frac · size` along a random direction and rotates it by
/// `frac` radians about a random axis.
pub fn displace(rng: &mut impl Rng, pose: &Pose<3>, size: f64, frac: f64) -> Pose<3> {
    let shift = random_unit(rng) * (frac * size);
    let axis = Unit::new_normalize(random_unit(rng));
    let turn = UnitQuaternion::from_axis_angle(&axis, frac);
    let rotation = turn.to_rotation_matrix().into_inner() * pose.rotation();
    Pose::new(rotation, pose.translation() + shift).expect("product of rotations is a rotation")
}

/// Mesh pool the configuration needs, if any.
pub fn mesh_pool(config: &BenchConfig) -> Result<Option<MeshPool>, InstanceError> {
    let verify = config.verify_mesh_climb;
    match config.shape_class {
        ShapeClass::Meshes => Ok(Some(match &config.mesh_dir {
            Some(dir) => MeshPool::load_dir(dir, verify)?,
            None => MeshPool::synthetic(SYNTHETIC_MESH_COUNT, SYNTHETIC_MESH_VERTICES, config.seed, verify)?,
        })),
        ShapeClass::Mixed => Ok(Some(match &config.mesh_dir {
            Some(dir) => MeshPool::load_dir(dir, verify)?,
            None => MeshPool::synthetic(MIXED_MESH_COUNT, MIXED_MESH_VERTICES, config.seed, verify)?,
        })),
        _ => Ok(None),
    }
}

/// Pair `id` of the configuration.
pub fn generate_pair(config: &BenchConfig, id: u64, pool: Option<&MeshPool>) -> Result<PairSpec, InstanceError> {
    let mut rng = stream(config.seed, id);
    let body1 = random_body(config.shape_class, &mut rng, config, pool)?;
    let body2 = random_body(config.shape_class, &mut rng, config, pool)?;
    let (r1, r2) = (body1.circumradius, body2.circumradius);
    let poses: Vec<_> = (0..config.poses_per_pair)
        .map(|_| random_poses(&mut rng, r1, r2))
        .collect();
    let displaced = if config.warm_start {
        poses
            .iter()
            .map(|(a, b)| {
                (
                    displace(&mut rng, a, r1, config.displacement_frac),
                    displace(&mut rng, b, r2, config.displacement_frac),
                )
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(PairSpec {
        id,
        body1,
        body2,
        poses,
        displaced,
    })
}

/// All pairs of the configuration, in id order.
pub fn generate_instances(config: &BenchConfig) -> Result<Vec<PairSpec>, InstanceError> {
    let pool = mesh_pool(config)?;
    (0..config.pairs as u64)
        .map(|id| generate_pair(config, id, pool.as_ref()))
        .collect()
}
