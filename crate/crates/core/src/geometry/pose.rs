use nalgebra::{SMatrix, UnitQuaternion};

use super::{GeometryError, Vector};

const ORTHONORMAL_TOL: f64 = 1e-12;

/// Rigid body transform `z -> R z + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<const L: usize> {
    rotation: SMatrix<f64, L, L>,
    translation: Vector<L>,
}

impl<const L: usize> Pose<L> {
    /// Builds a pose, checking `RᵀR = I` and `det R = +1`.
    pub fn new(rotation: SMatrix<f64, L, L>, translation: Vector<L>) -> Result<Self, GeometryError> {
        let gram = rotation.transpose() * rotation;
        let err = (gram - SMatrix::<f64, L, L>::identity()).amax();
        if !err.is_finite() || err > ORTHONORMAL_TOL {
            return Err(GeometryError::InvalidPose(format!(
                "rotation is not orthogonal (max |RᵀR - I| = {err:e})"
            )));
        }
        let det = super::dense(&rotation).determinant();
        if (det - 1.0).abs() > ORTHONORMAL_TOL {
            return Err(GeometryError::InvalidPose(format!(
                "rotation determinant is {det}, expected +1"
            )));
        }
        if translation.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::InvalidPose("translation is not finite".into()));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: SMatrix::identity(),
            translation: Vector::zeros(),
        }
    }

    pub fn from_translation(translation: Vector<L>) -> Self {
        Self {
            rotation: SMatrix::identity(),
            translation,
        }
    }

    #[inline]
    pub fn rotation(&self) -> &SMatrix<f64, L, L> {
        &self.rotation
    }

    #[inline]
    pub fn translation(&self) -> &Vector<L> {
        &self.translation
    }

    /// Maps a body-frame point into the world frame.
    #[inline]
    pub fn transform_point(&self, z: &Vector<L>) -> Vector<L> {
        self.rotation * z + self.translation
    }

    /// Maps a world-frame point into the body frame.
    #[inline]
    pub fn inverse_transform_point(&self, z: &Vector<L>) -> Vector<L> {
        self.rotation.tr_mul(&(z - self.translation))
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}

impl Pose<2> {
    pub fn from_angle(angle: f64, translation: Vector<2>) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            rotation: SMatrix::<f64, 2, 2>::new(c, -s, s, c),
            translation,
        }
    }
}

impl Pose<3> {
    pub fn from_quaternion(q: &UnitQuaternion<f64>, translation: Vector<3>) -> Self {
        Self {
            rotation: q.to_rotation_matrix().into_inner(),
            translation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, Vector3};

    #[test]
    fn rejects_reflections_and_shears() {
        let reflect = Matrix2::new(1.0, 0.0, 0.0, -1.0);
        assert!(matches!(
            Pose::new(reflect, Vector::zeros()),
            Err(GeometryError::InvalidPose(_))
        ));
        let shear = Matrix2::new(1.0, 0.1, 0.0, 1.0);
        assert!(Pose::new(shear, Vector::zeros()).is_err());
    }

    #[test]
    fn transform_round_trip() {
        let q = UnitQuaternion::from_euler_angles(0.3, -1.1, 2.0);
        let pose = Pose::from_quaternion(&q, Vector3::new(1.0, -2.0, 0.5));
        assert!(Pose::new(*pose.rotation(), *pose.translation()).is_ok());
        let z = Vector3::new(0.2, 0.7, -3.0);
        let back = pose.inverse_transform_point(&pose.transform_point(&z));
        assert!((back - z).norm() < 1e-14);
    }
}
