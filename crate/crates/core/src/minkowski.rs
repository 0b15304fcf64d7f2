//! The translated Minkowski difference `C = C1 - C2 + {p}` of two posed bodies.
//!
//! All vectors here are world frame. `p = p2 - p1` is the difference of the
//! world center points and is fixed when the pair is built; a new pose means
//! a new pair.

use crate::geometry::{unit_directions, CenterSpec, GeometryError, Pose, Shape, Vector};

/// Support evaluation on `C` with the two body witnesses that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffSupportEval<const L: usize> {
    pub value: f64,
    pub point: Vector<L>,
    /// Support point of body 1 along `λ`.
    pub witness1: Vector<L>,
    /// Support point of body 2 along `-λ`.
    pub witness2: Vector<L>,
}

/// Two posed shapes with center points.
#[derive(Debug, Clone)]
pub struct DifferencePair<'a, const L: usize> {
    pub shape1: &'a Shape<L>,
    pub pose1: Pose<L>,
    pub center1: CenterSpec<L>,
    pub shape2: &'a Shape<L>,
    pub pose2: Pose<L>,
    pub center2: CenterSpec<L>,
    world_center1: Vector<L>,
    world_center2: Vector<L>,
    p: Vector<L>,
    r_lb: f64,
}

impl<'a, const L: usize> DifferencePair<'a, L> {
    /// Fails with `InvalidParameter` unless the summed inradius bound is positive.
    pub fn new(
        shape1: &'a Shape<L>,
        pose1: Pose<L>,
        center1: CenterSpec<L>,
        shape2: &'a Shape<L>,
        pose2: Pose<L>,
        center2: CenterSpec<L>,
    ) -> Result<Self, GeometryError> {
        let r_lb = center1.inradius_lb + center2.inradius_lb;
        if !(r_lb > 0.0 && r_lb.is_finite()) {
            return Err(GeometryError::InvalidParameter(format!(
                "summed inradius bound must be positive, got {r_lb}"
            )));
        }
        let world_center1 = pose1.transform_point(&center1.center);
        let world_center2 = pose2.transform_point(&center2.center);
        Ok(Self {
            shape1,
            pose1,
            center1,
            shape2,
            pose2,
            center2,
            world_center1,
            world_center2,
            p: world_center2 - world_center1,
            r_lb,
        })
    }

    /// Same shapes and centers at new poses.
    pub fn with_poses(&self, pose1: Pose<L>, pose2: Pose<L>) -> Self {
        Self::new(self.shape1, pose1, self.center1, self.shape2, pose2, self.center2)
            .expect("inradius bounds already validated")
    }

    /// World-frame `p2 - p1`.
    #[inline]
    pub fn p(&self) -> &Vector<L> {
        &self.p
    }

    /// Radius of a ball around the origin contained in `C`.
    #[inline]
    pub fn r_lb(&self) -> f64 {
        self.r_lb
    }

    pub fn world_center1(&self) -> &Vector<L> {
        &self.world_center1
    }

    pub fn world_center2(&self) -> &Vector<L> {
        &self.world_center2
    }

    pub fn support_diff(&self, direction: &Vector<L>) -> Result<DiffSupportEval<L>, GeometryError> {
        let mut hints = [0, 0];
        self.support_diff_hinted(direction, &mut hints)
    }

    /// Support of `C` reusing per-body hill-climbing hints.
    pub fn support_diff_hinted(
        &self,
        direction: &Vector<L>,
        hints: &mut [usize; 2],
    ) -> Result<DiffSupportEval<L>, GeometryError> {
        let s1 = self
            .shape1
            .support_posed_hinted(&self.pose1, direction, &mut hints[0])?;
        let s2 = self
            .shape2
            .support_posed_hinted(&self.pose2, &-direction, &mut hints[1])?;
        Ok(DiffSupportEval {
            value: s1.value + s2.value + direction.dot(&self.p),
            point: s1.point - s2.point + self.p,
            witness1: s1.point,
            witness2: s2.point,
        })
    }

    /// Samples whether `B(0, r_lb) ⊂ C`: every sampled unit direction must
    /// have support value at least `r_lb`. The first direction is `p̂` when
    /// `p ≠ 0`. A necessary condition only.
    pub fn contains_origin_ball_check(&self, samples: usize) -> bool {
        let mut dirs = Vec::with_capacity(samples);
        let pn = self.p.norm();
        if pn > 0.0 {
            dirs.push(self.p / pn);
        }
        if dirs.len() < samples {
            dirs.extend(unit_directions::<L>(samples - dirs.len()));
        }
        dirs.truncate(samples.max(1));
        dirs.iter().all(|u| {
            self.support_diff(u)
                .map(|s| s.value >= self.r_lb - 1e-12)
                .unwrap_or(false)
        })
    }
}
