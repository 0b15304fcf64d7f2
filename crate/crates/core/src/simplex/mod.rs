//! Warm-started simplex for the conic-combination LP
//!
//! ```text
//! min Σ ν_m   s.t.   Σ ν_m z_m = p,  ν >= 0
//! ```
//!
//! over a small store of support points. A basis is `L` linearly independent
//! points; its dual normal `λ = Z⁻ᵀ𝟙` satisfies `⟨λ, z_m⟩ = 1` on the basis and
//! `⟨λ, p⟩ = Σ ν* = 1/βˡ`.
//!
//! Coefficients are carried in barycentric form (normalized to sum 1). They
//! are computed by signed volumes of the basis projected along the target
//! direction, which avoids inverting an ill-conditioned `Z` when the basis
//! points cluster near the optimum.

mod linalg;

pub use linalg::{barycentric_along, plain_coefficients};

use thiserror::Error;

use crate::geometry::Vector;

/// Columns whose column-normalized determinant falls below this are singular.
pub const SINGULAR_DET_TOL: f64 = 1e-14;
/// `ν̃_m` above this fraction of `max ν̃` counts as a positive pivot entry.
pub const PIVOT_TOL: f64 = 1e-12;
/// Reduced costs must be below `-REDUCED_COST_TOL` to enter the basis.
pub const REDUCED_COST_TOL: f64 = 1e-12;
/// Step lengths below this count as degenerate pivots.
const DEGENERATE_STEP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("basis is singular")]
    SingularBasis,
    #[error("no positive entry in the pivot column")]
    NoPositivePivot,
    #[error("basis does not reproduce p with a positive objective")]
    InfeasibleBasis,
    #[error("pivot limit reached (cycling)")]
    CycleLimit,
}

/// A support point of `C` together with the body witnesses that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoreEntry<const L: usize> {
    /// Iteration index: `-L+1..=0` for initialization points, `k >= 1` for
    /// support queries, below `-L` for warm-start points.
    pub index: i64,
    pub z: Vector<L>,
    pub witness1: Vector<L>,
    pub witness2: Vector<L>,
}

/// Inner-approximation vertices.
#[derive(Debug, Clone, Default)]
pub struct VertexStore<const L: usize> {
    entries: Vec<StoreEntry<L>>,
}

impl<const L: usize> VertexStore<L> {
    pub fn new() -> Self {
        Self {
            entries: Vec::with_capacity(2 * L + 2),
        }
    }

    /// Appends an entry and returns its position. Indices must stay unique.
    pub fn push(&mut self, entry: StoreEntry<L>) -> usize {
        debug_assert!(self.entries.iter().all(|e| e.index != entry.index));
        self.entries.push(entry);
        self.entries.len() - 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[StoreEntry<L>] {
        &self.entries
    }

    pub fn position_of(&self, index: i64) -> Option<usize> {
        self.entries.iter().position(|e| e.index == index)
    }

    /// Keeps the entries at `keep` (ascending positions) and returns the old
    /// position → new position map.
    pub(crate) fn retain_positions(&mut self, keep: &[usize]) -> Vec<Option<usize>> {
        let mut map = vec![None; self.entries.len()];
        let mut out = Vec::with_capacity(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            map[old] = Some(new);
            out.push(self.entries[old]);
        }
        self.entries = out;
        map
    }

    pub(crate) fn remove(&mut self, pos: usize) {
        self.entries.remove(pos);
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }
}

impl<const L: usize> std::ops::Index<usize> for VertexStore<L> {
    type Output = StoreEntry<L>;
    fn index(&self, pos: usize) -> &StoreEntry<L> {
        &self.entries[pos]
    }
}

/// An optimal or intermediate simplex basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis<const L: usize> {
    /// Store positions of the basis columns.
    pub slots: [usize; L],
    /// Barycentric coefficients of `βˡ p` in the basis points (sum to 1).
    pub mu_star: Vector<L>,
    /// `1 / Σ ν*`.
    pub beta_lower: f64,
    /// `Z⁻ᵀ𝟙`, not normalized.
    pub normal: Vector<L>,
}

impl<const L: usize> Basis<L> {
    /// Evaluates the basis formed by the store entries at `slots`.
    pub fn from_slots(
        store: &VertexStore<L>,
        slots: [usize; L],
        p: &Vector<L>,
    ) -> Result<Self, SimplexError> {
        let cols = slots.map(|s| store[s].z);
        let normal = normal_from_basis(&cols)?;
        let inv_beta = normal.dot(p);
        if !(inv_beta > 0.0 && inv_beta.is_finite()) {
            return Err(SimplexError::InfeasibleBasis);
        }
        let mu_star = barycentric_along(&cols, p)?;
        Ok(Self {
            slots,
            mu_star,
            beta_lower: 1.0 / inv_beta,
            normal,
        })
    }

    /// Conic coefficients `ν*` (sum `1/βˡ`).
    pub fn nu_star(&self) -> Vector<L> {
        self.mu_star / self.beta_lower
    }

    pub fn columns(&self, store: &VertexStore<L>) -> [Vector<L>; L] {
        self.slots.map(|s| store[s].z)
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.slots.contains(&pos)
    }
}

/// `λ = Z⁻ᵀ𝟙` for the columns of `Z`.
///
/// In 2D and 3D this uses the normal of the simplex spanned by the columns,
/// `λ = N / ⟨z_0, N⟩`, which stays accurate when the columns nearly coincide.
pub fn normal_from_basis<const L: usize>(cols: &[Vector<L>; L]) -> Result<Vector<L>, SimplexError> {
    linalg::normal_from_columns(cols)
}

/// `1 - ⟨λ, z⟩`.
#[inline]
pub fn reduced_cost<const L: usize>(normal: &Vector<L>, z: &Vector<L>) -> f64 {
    1.0 - normal.dot(z)
}

/// Outgoing basis position: `argmin ν*_m / ν̃_m` over `ν̃_m > 0`, lowest position on ties.
pub fn ratio_test<const L: usize>(
    nu_star: &Vector<L>,
    nu_tilde: &Vector<L>,
) -> Result<usize, SimplexError> {
    ratio_test_keyed(nu_star, nu_tilde, |m| m as i64)
}

/// Ratio test with ties broken by the smallest `key`.
fn ratio_test_keyed<const L: usize>(
    nu_star: &Vector<L>,
    nu_tilde: &Vector<L>,
    key: impl Fn(usize) -> i64,
) -> Result<usize, SimplexError> {
    let max_tilde = nu_tilde.max();
    if !(max_tilde > 0.0) {
        return Err(SimplexError::NoPositivePivot);
    }
    let threshold = PIVOT_TOL * max_tilde;
    let mut best: Option<(usize, f64)> = None;
    for m in 0..L {
        if nu_tilde[m] > threshold {
            let ratio = nu_star[m].max(0.0) / nu_tilde[m];
            best = match best {
                Some((b, r)) if ratio > r || (ratio == r && key(m) >= key(b)) => Some((b, r)),
                _ => Some((m, ratio)),
            };
        }
    }
    best.map(|(m, _)| m).ok_or(SimplexError::NoPositivePivot)
}

/// Barycentric forms of `ν̃ = Z⁻¹ z_k` and `ν* = Z⁻¹ p` by the signed-volume route.
///
/// Each coefficient vector is normalized to sum 1, a positive rescaling as
/// long as `⟨λ, z_k⟩ > 0` and `⟨λ, p⟩ > 0`.
pub fn robust_coefficients<const L: usize>(
    cols: &[Vector<L>; L],
    z_k: &Vector<L>,
    p: &Vector<L>,
) -> Result<(Vector<L>, Vector<L>), SimplexError> {
    Ok((barycentric_along(cols, z_k)?, barycentric_along(cols, p)?))
}

/// Pivot bookkeeping from one [`simplex_solve`] call.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimplexStats {
    pub pivots: usize,
    pub degenerate_pivots: usize,
    /// Store index of the first entering column, if any pivot happened.
    pub first_entering: Option<i64>,
}

/// Re-optimizes `basis` over every column of `store`.
///
/// Dantzig's rule picks the entering column (ties to the smallest store
/// index); after `2L` consecutive degenerate pivots Bland's rule takes over,
/// and the solve aborts after `100·L` pivots.
pub fn simplex_solve<const L: usize>(
    store: &VertexStore<L>,
    initial: Basis<L>,
    p: &Vector<L>,
) -> Result<(Basis<L>, SimplexStats), SimplexError> {
    let mut basis = initial;
    let mut stats = SimplexStats::default();
    let mut degenerate_run = 0;
    loop {
        let bland = degenerate_run >= 2 * L;
        let mut entering: Option<(usize, f64)> = None;
        for (pos, e) in store.entries().iter().enumerate() {
            if basis.contains(pos) {
                continue;
            }
            let d = reduced_cost(&basis.normal, &e.z);
            if d < -REDUCED_COST_TOL {
                let better = match entering {
                    None => true,
                    Some((bp, bd)) => {
                        let earlier = e.index < store[bp].index;
                        if bland {
                            earlier
                        } else {
                            d < bd || (d == bd && earlier)
                        }
                    }
                };
                if better {
                    entering = Some((pos, d));
                }
            }
        }
        let Some((enter, _)) = entering else {
            return Ok((basis, stats));
        };
        if stats.pivots >= 100 * L {
            return Err(SimplexError::CycleLimit);
        }

        let cols = basis.columns(store);
        let mu_tilde = barycentric_along(&cols, &store[enter].z)?;
        let out = if bland {
            ratio_test_keyed(&basis.mu_star, &mu_tilde, |m| store[basis.slots[m]].index)?
        } else {
            ratio_test(&basis.mu_star, &mu_tilde)?
        };
        #[cfg(debug_assertions)]
        linalg::debug_cross_check(&cols, &store[enter].z, p, out);

        let step = basis.mu_star[out].max(0.0) / mu_tilde[out];
        if step <= DEGENERATE_STEP_TOL {
            degenerate_run += 1;
            stats.degenerate_pivots += 1;
        } else {
            degenerate_run = 0;
        }
        if stats.first_entering.is_none() {
            stats.first_entering = Some(store[enter].index);
        }
        let mut slots = basis.slots;
        slots[out] = enter;
        basis = Basis::from_slots(store, slots, p)?;
        stats.pivots += 1;
    }
}

#[cfg(test)]
mod tests;
