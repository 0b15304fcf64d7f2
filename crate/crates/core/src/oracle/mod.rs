//! Independent references for testing: closed forms, exhaustive basis
//! enumeration for polytope pairs, and direction-sampling brackets.
//!
//! None of this shares code with the solver's simplex.

pub mod hull;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::geometry::{unit_directions, Vector};
use crate::minkowski::DifferencePair;

/// Largest difference set the exhaustive oracles accept.
pub const MAX_DIFFERENCES: usize = 400;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no feasible basis among the vertex differences")]
    NoFeasibleBasis,
    #[error("{count} vertex differences exceed the oracle limit of {MAX_DIFFERENCES}")]
    TooLarge { count: usize },
}

/// `β` bounds: `beta_lo <= β* <= beta_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub beta_lo: f64,
    pub beta_hi: f64,
}

impl Bracket {
    /// `[1/beta_hi, 1/beta_lo]`.
    pub fn alpha_range(&self) -> (f64, f64) {
        (1.0 / self.beta_hi, 1.0 / self.beta_lo)
    }

    pub fn contains_alpha(&self, alpha: f64, rel_tol: f64) -> bool {
        let (lo, hi) = self.alpha_range();
        alpha >= lo * (1.0 - rel_tol) && alpha <= hi * (1.0 + rel_tol)
    }

    /// `beta_hi / beta_lo - 1`.
    pub fn relative_width(&self) -> f64 {
        self.beta_hi / self.beta_lo - 1.0
    }
}

/// Growth distance of two balls.
pub fn sphere_growth_distance(r1: f64, r2: f64, center_distance: f64) -> f64 {
    center_distance / (r1 + r2)
}

/// Growth distance of two axis-aligned boxes given their half extents and
/// the center offset `p2 - p1`.
pub fn aligned_box_growth_distance<const L: usize>(
    half1: &Vector<L>,
    half2: &Vector<L>,
    p: &Vector<L>,
) -> f64 {
    (0..L)
        .map(|i| p[i].abs() / (half1[i] + half2[i]))
        .fold(0.0, f64::max)
}

fn differences<const L: usize>(
    verts1: &[Vector<L>],
    verts2: &[Vector<L>],
    p1: &Vector<L>,
    p2: &Vector<L>,
) -> Result<(Vec<Vector<L>>, Vector<L>), OracleError> {
    let count = verts1.len() * verts2.len();
    if count > MAX_DIFFERENCES {
        return Err(OracleError::TooLarge { count });
    }
    let p = p2 - p1;
    let mut z: Vec<Vector<L>> = Vec::with_capacity(count);
    for a in verts1 {
        for b in verts2 {
            let d = a - b + p;
            if !z.contains(&d) {
                z.push(d);
            }
        }
    }
    Ok((z, p))
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `min Σν` s.t. `Σ ν_m z_m = p`, `ν >= 0` over every `L`-subset of `points`.
pub fn min_conic_objective<const L: usize>(points: &[Vector<L>], p: &Vector<L>) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut keep = |nu: &[f64]| {
        if nu.iter().all(|&v| v >= -1e-12) {
            let obj: f64 = nu.iter().sum();
            if best.is_none_or(|b| obj < b) {
                best = Some(obj);
            }
        }
    };
    match L {
        2 => {
            let (px, py) = (p[0], p[1]);
            for_each_combination(points.len(), 2, |idx| {
                let (a, b) = (&points[idx[0]], &points[idx[1]]);
                let det = a[0] * b[1] - a[1] * b[0];
                if !(det.abs() > 1e-13 * a.norm() * b.norm()) {
                    return;
                }
                keep(&[(px * b[1] - py * b[0]) / det, (a[0] * py - a[1] * px) / det]);
            });
            return best;
        }
        3 => {
            let p3 = nalgebra::Vector3::new(p[0], p[1], p[2]);
            let v: Vec<nalgebra::Vector3<f64>> =
                points.iter().map(|z| nalgebra::Vector3::new(z[0], z[1], z[2])).collect();
            for_each_combination(v.len(), 3, |idx| {
                let (a, b, c) = (&v[idx[0]], &v[idx[1]], &v[idx[2]]);
                let bc = b.cross(c);
                let det = a.dot(&bc);
                if !(det.abs() > 1e-13 * a.norm() * b.norm() * c.norm()) {
                    return;
                }
                keep(&[p3.dot(&bc) / det, a.dot(&p3.cross(c)) / det, a.dot(&b.cross(&p3)) / det]);
            });
            return best;
        }
        _ => {}
    }
    for_each_combination(points.len(), L, |idx| {
        let z = DMatrix::<f64>::from_fn(L, L, |i, j| points[idx[j]][i]);
        let scale: f64 = (0..L).map(|j| z.column(j).norm()).product();
        let lu = z.lu();
        if !(lu.determinant().abs() > 1e-13 * scale) {
            return;
        }
        let Some(nu) = lu.solve(&DVector::from_column_slice(p.as_slice())) else { return };
        keep(nu.as_slice());
    });
    best
}

/// Growth distance of two polytopes by exhaustive basis enumeration over all
/// vertex differences `v1_i - v2_j + p`, with `p = p2 - p1`.
///
/// `p1` and `p2` must lie strictly inside their polytopes.
pub fn polytope_growth_distance_bruteforce<const L: usize>(
    verts1: &[Vector<L>],
    verts2: &[Vector<L>],
    p1: &Vector<L>,
    p2: &Vector<L>,
) -> Result<f64, OracleError> {
    let (z, p) = differences(verts1, verts2, p1, p2)?;
    if p == Vector::<L>::zeros() {
        return Ok(0.0);
    }
    min_conic_objective(&z, &p).ok_or(OracleError::NoFeasibleBasis)
}

/// The same quantity from the dual side: the maximum of `⟨λ, p⟩ / h(λ)` over
/// hyperplanes through every `L`-subset of differences, where `h` is the
/// support value of the difference set. Facet normals are among the
/// candidates, so the maximum is exact.
pub fn polytope_growth_distance_dual<const L: usize>(
    verts1: &[Vector<L>],
    verts2: &[Vector<L>],
    p1: &Vector<L>,
    p2: &Vector<L>,
) -> Result<f64, OracleError> {
    let (z, p) = differences(verts1, verts2, p1, p2)?;
    let mut best: Option<f64> = None;
    for_each_combination(z.len(), L, |idx| {
        let zt = DMatrix::<f64>::from_fn(L, L, |i, j| z[idx[i]][j]);
        let lu = zt.lu();
        if lu.determinant().abs() < 1e-13 {
            return;
        }
        let Some(lambda) = lu.solve(&DVector::repeat(L, 1.0)) else { return };
        let lambda = Vector::<L>::from_column_slice(lambda.as_slice());
        let lp = lambda.dot(&p);
        if lp <= 0.0 {
            return;
        }
        let h = z.iter().map(|w| lambda.dot(w)).fold(f64::MIN, f64::max);
        if h <= 0.0 {
            return;
        }
        let ratio = lp / h;
        if best.is_none_or(|b| ratio > b) {
            best = Some(ratio);
        }
    });
    best.ok_or(OracleError::NoFeasibleBasis)
}

/// Brackets `β*` from `directions` deterministic sample directions plus `p̂`.
pub fn bracket_by_sampling<const L: usize>(pair: &DifferencePair<'_, L>, directions: usize) -> Bracket {
    let mut dirs = unit_directions::<L>(directions);
    let pn = pair.p().norm();
    if pn > 0.0 {
        dirs.push(pair.p() / pn);
    }
    bracket_with_directions(pair, &dirs)
}

/// Brackets `β*` from support queries along `dirs`.
///
/// The upper bound is the best outer bound over the sample. The lower bound is
/// where the ray along `p` leaves the hull of the sampled support points,
/// which is the inner LP optimum over those points.
pub fn bracket_with_directions<const L: usize>(
    pair: &DifferencePair<'_, L>,
    dirs: &[Vector<L>],
) -> Bracket {
    let p = *pair.p();
    let mut beta_hi = f64::INFINITY;
    let mut points = Vec::with_capacity(dirs.len());
    for d in dirs {
        let Ok(s) = pair.support_diff(d) else { continue };
        let dp = d.dot(&p);
        if dp > 0.0 {
            beta_hi = beta_hi.min(s.value / dp);
        }
        points.push(s.point);
    }
    let beta_lo = inner_bound(&points, &p);
    Bracket {
        beta_lo: beta_lo.min(beta_hi),
        beta_hi,
    }
}

fn inner_bound<const L: usize>(points: &[Vector<L>], p: &Vector<L>) -> f64 {
    if let Some(planes) = hull::facet_planes(points) {
        if planes.iter().any(|(_, d)| *d <= 0.0) {
            return 0.0;
        }
        return planes
            .iter()
            .filter_map(|(n, d)| {
                let s = n.dot(p);
                (s > 0.0).then(|| d / s)
            })
            .fold(f64::INFINITY, f64::min);
    }
    min_conic_objective(points, p).map_or(0.0, |obj| 1.0 / obj)
}
