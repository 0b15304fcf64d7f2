use std::hash::{DefaultHasher, Hash, Hasher};

use super::{unit_directions, GeometryError, Mesh, Pose, Vector};

/// Lateral components below this fraction of `|λ|` select the cap center of a cylinder.
const CYLINDER_AXIS_TOL: f64 = 1e-12;

/// Support value and a maximizing point.
///
/// `value` is always computed as `⟨direction, point⟩`, so the identity holds
/// exactly as evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportEval<const L: usize> {
    pub value: f64,
    pub point: Vector<L>,
}

impl<const L: usize> SupportEval<L> {
    #[inline]
    fn at(direction: &Vector<L>, point: Vector<L>) -> Self {
        Self {
            value: direction.dot(&point),
            point,
        }
    }
}

/// A compact convex body in its body frame.
///
/// Primitives are centered at the origin; capsules and cylinders are aligned
/// with the last coordinate axis. Use the constructors, which validate the
/// size parameters.
#[derive(Debug, Clone)]
pub enum Shape<const L: usize> {
    /// Convex hull of a small vertex list, evaluated by exhaustive scan.
    Polytope { vertices: Vec<Vector<L>> },
    Sphere { radius: f64 },
    Ellipsoid { semi_axes: Vector<L> },
    /// Segment `[-h, h]·e_last` dilated by a ball.
    Capsule { half_length: f64, radius: f64 },
    Cylinder { half_height: f64, radius: f64 },
    Box { half_extents: Vector<L> },
    /// Large vertex hull with adjacency, evaluated by hill climbing.
    MeshHull(Mesh<L>),
}

fn positive(name: &str, x: f64) -> Result<(), GeometryError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::InvalidParameter(format!(
            "{name} must be finite and positive, got {x}"
        )))
    }
}

impl<const L: usize> Shape<L> {
    pub fn polytope(vertices: Vec<Vector<L>>) -> Result<Self, GeometryError> {
        if vertices.is_empty() {
            return Err(GeometryError::InvalidParameter("polytope has no vertices".into()));
        }
        if vertices.iter().flat_map(|v| v.iter()).any(|x| !x.is_finite()) {
            return Err(GeometryError::InvalidParameter("polytope vertex is not finite".into()));
        }
        Ok(Shape::Polytope { vertices })
    }

    pub fn sphere(radius: f64) -> Result<Self, GeometryError> {
        positive("radius", radius)?;
        Ok(Shape::Sphere { radius })
    }

    pub fn ellipsoid(semi_axes: Vector<L>) -> Result<Self, GeometryError> {
        for &a in semi_axes.iter() {
            positive("semi-axis", a)?;
        }
        Ok(Shape::Ellipsoid { semi_axes })
    }

    pub fn capsule(half_length: f64, radius: f64) -> Result<Self, GeometryError> {
        if !(half_length.is_finite() && half_length >= 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "half_length must be finite and non-negative, got {half_length}"
            )));
        }
        positive("radius", radius)?;
        Ok(Shape::Capsule {
            half_length,
            radius,
        })
    }

    pub fn cylinder(half_height: f64, radius: f64) -> Result<Self, GeometryError> {
        positive("half_height", half_height)?;
        positive("radius", radius)?;
        Ok(Shape::Cylinder {
            half_height,
            radius,
        })
    }

    pub fn cuboid(half_extents: Vector<L>) -> Result<Self, GeometryError> {
        for &h in half_extents.iter() {
            positive("half-extent", h)?;
        }
        Ok(Shape::Box { half_extents })
    }

    pub fn mesh(mesh: Mesh<L>) -> Self {
        Shape::MeshHull(mesh)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Polytope { .. } => "polytope",
            Shape::Sphere { .. } => "sphere",
            Shape::Ellipsoid { .. } => "ellipsoid",
            Shape::Capsule { .. } => "capsule",
            Shape::Cylinder { .. } => "cylinder",
            Shape::Box { .. } => "box",
            Shape::MeshHull(_) => "mesh",
        }
    }

    /// Support value and point in the body frame.
    pub fn support(&self, direction: &Vector<L>) -> Result<SupportEval<L>, GeometryError> {
        let mut hint = 0;
        self.support_hinted(direction, &mut hint)
    }

    /// Like [`Shape::support`], but meshes start hill climbing at `*hint` and
    /// write back the vertex they reached. Other shapes ignore the hint.
    pub fn support_hinted(
        &self,
        direction: &Vector<L>,
        hint: &mut usize,
    ) -> Result<SupportEval<L>, GeometryError> {
        if direction.iter().all(|&x| x == 0.0) {
            return Err(GeometryError::ZeroDirection);
        }
        let eval = match self {
            Shape::Polytope { vertices } => {
                let i = argmax_dot(vertices, direction);
                SupportEval::at(direction, vertices[i])
            }
            Shape::Sphere { radius } => {
                SupportEval::at(direction, direction * (radius / direction.norm()))
            }
            Shape::Ellipsoid { semi_axes } => {
                let scaled = direction.component_mul(semi_axes);
                let n = scaled.norm();
                SupportEval::at(direction, scaled.component_mul(semi_axes) / n)
            }
            Shape::Capsule {
                half_length,
                radius,
            } => {
                let mut point = direction * (radius / direction.norm());
                point[L - 1] += axis_sign(direction[L - 1]) * half_length;
                SupportEval::at(direction, point)
            }
            Shape::Cylinder {
                half_height,
                radius,
            } => {
                let mut lateral = *direction;
                lateral[L - 1] = 0.0;
                let lat_norm = lateral.norm();
                let mut point = if lat_norm > CYLINDER_AXIS_TOL * direction.norm() {
                    lateral * (radius / lat_norm)
                } else {
                    Vector::zeros()
                };
                point[L - 1] = axis_sign(direction[L - 1]) * half_height;
                SupportEval::at(direction, point)
            }
            Shape::Box { half_extents } => {
                let point = Vector::from_fn(|i, _| axis_sign(direction[i]) * half_extents[i]);
                SupportEval::at(direction, point)
            }
            Shape::MeshHull(mesh) => {
                if mesh.uses_hill_climbing() {
                    let climb = mesh.hill_climb(direction, *hint)?;
                    *hint = climb.vertex;
                    climb.eval
                } else {
                    let i = argmax_dot(mesh.vertices(), direction);
                    *hint = i;
                    SupportEval::at(direction, mesh.vertices()[i])
                }
            }
        };
        Ok(eval)
    }

    /// Support of the posed set `R·S + t` in world coordinates.
    pub fn support_posed(
        &self,
        pose: &Pose<L>,
        direction: &Vector<L>,
    ) -> Result<SupportEval<L>, GeometryError> {
        let mut hint = 0;
        self.support_posed_hinted(pose, direction, &mut hint)
    }

    pub fn support_posed_hinted(
        &self,
        pose: &Pose<L>,
        direction: &Vector<L>,
        hint: &mut usize,
    ) -> Result<SupportEval<L>, GeometryError> {
        let local = pose.rotation().tr_mul(direction);
        let body = self.support_hinted(&local, hint)?;
        Ok(SupportEval::at(direction, pose.transform_point(&body.point)))
    }

    /// Lower bound on the inradius at `center` (body frame).
    ///
    /// Primitives get a closed form (exact at the canonical centroid,
    /// conservative elsewhere). Polytopes and meshes return `supplied`
    /// unchanged; computing their inradius is left to the caller.
    pub fn inradius_bound(
        &self,
        center: &Vector<L>,
        supplied: Option<f64>,
    ) -> Result<f64, GeometryError> {
        let r = match self {
            Shape::Polytope { .. } | Shape::MeshHull(_) => {
                let r = supplied.ok_or(GeometryError::MissingInradius)?;
                if !(r.is_finite() && r >= 0.0) {
                    return Err(GeometryError::InvalidParameter(format!(
                        "inradius bound must be non-negative, got {r}"
                    )));
                }
                return Ok(r);
            }
            Shape::Sphere { radius } => radius - center.norm(),
            Shape::Ellipsoid { semi_axes } => semi_axes.min() - center.norm(),
            Shape::Box { half_extents } => (half_extents - center.abs()).min(),
            Shape::Capsule {
                half_length,
                radius,
            } => {
                let mut off = *center;
                off[L - 1] -= center[L - 1].clamp(-half_length, *half_length);
                radius - off.norm()
            }
            Shape::Cylinder {
                half_height,
                radius,
            } => {
                let mut lateral = *center;
                lateral[L - 1] = 0.0;
                (radius - lateral.norm()).min(half_height - center[L - 1].abs())
            }
        };
        if r > 0.0 {
            Ok(r)
        } else {
            Err(GeometryError::CenterOutside)
        }
    }

    /// Largest distance from `center` to any point of the shape.
    pub fn circumradius(&self, center: &Vector<L>) -> f64 {
        match self {
            Shape::Polytope { vertices } => vertices
                .iter()
                .map(|v| (v - center).norm())
                .fold(0.0, f64::max),
            Shape::MeshHull(mesh) => mesh
                .vertices()
                .iter()
                .map(|v| (v - center).norm())
                .fold(0.0, f64::max),
            Shape::Sphere { radius } => radius + center.norm(),
            Shape::Ellipsoid { semi_axes } => semi_axes.max() + center.norm(),
            Shape::Box { half_extents } => half_extents.norm() + center.norm(),
            Shape::Capsule {
                half_length,
                radius,
            } => half_length + radius + center.norm(),
            Shape::Cylinder {
                half_height,
                radius,
            } => (half_height * half_height + radius * radius).sqrt() + center.norm(),
        }
    }

    /// Hash of the shape's defining data, used to match warm-start data to shapes.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.kind().hash(&mut h);
        let mut put = |xs: &mut dyn Iterator<Item = f64>| {
            for x in xs {
                x.to_bits().hash(&mut h);
            }
        };
        match self {
            Shape::Polytope { vertices } => put(&mut vertices.iter().flat_map(|v| v.iter().copied())),
            Shape::Sphere { radius } => put(&mut std::iter::once(*radius)),
            Shape::Ellipsoid { semi_axes } => put(&mut semi_axes.iter().copied()),
            Shape::Box { half_extents } => put(&mut half_extents.iter().copied()),
            Shape::Capsule {
                half_length,
                radius,
            } => put(&mut [*half_length, *radius].into_iter()),
            Shape::Cylinder {
                half_height,
                radius,
            } => put(&mut [*half_height, *radius].into_iter()),
            Shape::MeshHull(mesh) => mesh.fingerprint().hash(&mut h),
        }
        h.finish()
    }
}

#[inline]
fn axis_sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Index of the maximizing vertex; the lowest index wins ties.
#[inline]
pub(crate) fn argmax_dot<const L: usize>(vertices: &[Vector<L>], direction: &Vector<L>) -> usize {
    let mut best = 0;
    let mut best_val = vertices[0].dot(direction);
    for (i, v) in vertices.iter().enumerate().skip(1) {
        let d = v.dot(direction);
        if d > best_val {
            best = i;
            best_val = d;
        }
    }
    best
}

/// Center point and inradius lower bound of a body, both in the body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterSpec<const L: usize> {
    pub center: Vector<L>,
    pub inradius_lb: f64,
}

impl<const L: usize> CenterSpec<L> {
    pub fn new(center: Vector<L>, inradius_lb: f64) -> Result<Self, GeometryError> {
        if !(inradius_lb.is_finite() && inradius_lb >= 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "inradius bound must be non-negative, got {inradius_lb}"
            )));
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::InvalidParameter("center is not finite".into()));
        }
        Ok(Self {
            center,
            inradius_lb,
        })
    }

    /// Canonical centroid with the closed-form inradius of a primitive.
    pub fn for_shape(shape: &Shape<L>) -> Result<Self, GeometryError> {
        let center = Vector::zeros();
        let r = shape.inradius_bound(&center, None)?;
        Self::new(center, r)
    }

    /// Checks that the ball `B(center, inradius_lb)` is not cut by any of
    /// `samples` deterministic directions. Necessary, not sufficient.
    pub fn spot_check(&self, shape: &Shape<L>, samples: usize) -> bool {
        unit_directions::<L>(samples).iter().all(|u| {
            shape
                .support(u)
                .map(|s| s.value - u.dot(&self.center) >= self.inradius_lb - 1e-12)
                .unwrap_or(false)
        })
    }
}
