use crate::geometry::{Shape, Vector};
use crate::minkowski::DifferencePair;

/// Witness pairs of a finished solve, stored in each body's own frame so they
/// can be re-posed for the next query on the same shapes. Only the solver
/// produces it, so every stored point lies in its body.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WarmStartData<const L: usize> {
    pub(crate) pairs: Vec<(Vector<L>, Vector<L>)>,
    pub(crate) fingerprints: (u64, u64),
}

impl<const L: usize> WarmStartData<L> {
    /// Converts world-frame witness pairs of `pair` to body frames.
    pub(crate) fn from_world(
        pair: &DifferencePair<'_, L>,
        world: impl IntoIterator<Item = (Vector<L>, Vector<L>)>,
    ) -> Self {
        Self {
            pairs: world
                .into_iter()
                .map(|(w1, w2)| {
                    (
                        pair.pose1.inverse_transform_point(&w1),
                        pair.pose2.inverse_transform_point(&w2),
                    )
                })
                .collect(),
            fingerprints: (pair.shape1.fingerprint(), pair.shape2.fingerprint()),
        }
    }

    /// Whether the data was produced for this ordered pair of shapes.
    pub fn matches(&self, shape1: &Shape<L>, shape2: &Shape<L>) -> bool {
        !self.pairs.is_empty() && self.fingerprints == (shape1.fingerprint(), shape2.fingerprint())
    }

    /// `(point of body 1, point of body 2)` in body coordinates.
    pub fn pairs(&self) -> &[(Vector<L>, Vector<L>)] {
        &self.pairs
    }

    /// Fingerprints of the shapes the pairs belong to.
    pub fn fingerprints(&self) -> (u64, u64) {
        self.fingerprints
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
}
