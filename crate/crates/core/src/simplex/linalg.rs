//! Small dense kernels for the simplex: closed forms for `L ∈ {2, 3}`,
//! partial-pivoting LU otherwise.

use nalgebra::{DMatrix, DVector, SMatrix};

use super::{SimplexError, SINGULAR_DET_TOL};
use crate::geometry::{dense, Vector};

#[inline]
fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn column_scale<const L: usize>(cols: &[Vector<L>; L]) -> Result<f64, SimplexError> {
    let scale: f64 = cols.iter().map(|c| c.norm()).product();
    if scale > 0.0 && scale.is_finite() {
        Ok(scale)
    } else {
        Err(SimplexError::SingularBasis)
    }
}

pub(super) fn normal_from_columns<const L: usize>(
    cols: &[Vector<L>; L],
) -> Result<Vector<L>, SimplexError> {
    let scale = column_scale(cols)?;
    let n = match L {
        2 => {
            let d = cols[1] - cols[0];
            let mut n = Vector::<L>::zeros();
            n[0] = -d[1];
            n[1] = d[0];
            n
        }
        3 => {
            let u = cols[1] - cols[0];
            let v = cols[2] - cols[0];
            let mut n = Vector::<L>::zeros();
            n[0] = u[1] * v[2] - u[2] * v[1];
            n[1] = u[2] * v[0] - u[0] * v[2];
            n[2] = u[0] * v[1] - u[1] * v[0];
            n
        }
        _ => {
            let zt = DMatrix::<f64>::from_fn(L, L, |i, j| cols[i][j]);
            let lu = zt.lu();
            if !(lu.determinant().abs() / scale >= SINGULAR_DET_TOL) {
                return Err(SimplexError::SingularBasis);
            }
            let solve = |rhs: DVector<f64>| {
                lu.solve(&rhs)
                    .filter(|x| x.iter().all(|v| v.is_finite()))
                    .map(|x| Vector::<L>::from_column_slice(x.as_slice()))
                    .ok_or(SimplexError::SingularBasis)
            };
            let lambda = solve(DVector::repeat(L, 1.0))?;
            let r = DVector::from_fn(L, |i, _| 1.0 - cols[i].dot(&lambda));
            return Ok(lambda + solve(r)?);
        }
    };
    let det = cols[0].dot(&n);
    if !(det.abs() / scale >= SINGULAR_DET_TOL) {
        return Err(SimplexError::SingularBasis);
    }
    let lambda = n / det;
    let refined = lambda + transpose_solve(cols, &cols.map(|c| 1.0 - c.dot(&lambda)));
    if refined.iter().all(|v| v.is_finite()) {
        Ok(refined)
    } else {
        Err(SimplexError::SingularBasis)
    }
}

/// `δ` with `⟨cols[i], δ⟩ = r[i]` for `L ∈ {2, 3}`, by Cramer's rule.
fn transpose_solve<const L: usize>(cols: &[Vector<L>; L], r: &[f64; L]) -> Vector<L> {
    let mut d = Vector::<L>::zeros();
    if r.iter().all(|&x| x == 0.0) {
        return d;
    }
    if L == 2 {
        let (a, b) = (&cols[0], &cols[1]);
        let det = a[0] * b[1] - a[1] * b[0];
        d[0] = (r[0] * b[1] - r[1] * a[1]) / det;
        d[1] = (a[0] * r[1] - b[0] * r[0]) / det;
    } else {
        let cross = |u: &Vector<L>, v: &Vector<L>| {
            [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
        };
        let bc = cross(&cols[1], &cols[2]);
        let ca = cross(&cols[2], &cols[0]);
        let ab = cross(&cols[0], &cols[1]);
        let det = cols[0][0] * bc[0] + cols[0][1] * bc[1] + cols[0][2] * bc[2];
        for i in 0..3 {
            d[i] = (r[0] * bc[i] + r[1] * ca[i] + r[2] * ab[i]) / det;
        }
    }
    d
}

/// Barycentric coordinates (summing to 1) of the point where the line through
/// the origin along `y` meets the affine hull of `cols`.
///
/// The columns are mapped by the oblique projection with kernel `y` onto the
/// coordinate hyperplane that drops `argmax |y_i|`, then the coordinates come
/// from signed sub-volumes in `L - 1` dimensions. Equals `Z⁻¹y / 𝟙ᵀZ⁻¹y`.
pub fn barycentric_along<const L: usize>(
    cols: &[Vector<L>; L],
    y: &Vector<L>,
) -> Result<Vector<L>, SimplexError> {
    let k = y.iamax();
    let yk = y[k];
    if !(yk != 0.0 && yk.is_finite()) {
        return Err(SimplexError::SingularBasis);
    }
    let project = |z: &Vector<L>| -> Vector<L> {
        let mut q = z - y * (z[k] / yk);
        q[k] = 0.0;
        q
    };
    let mut mu = Vector::<L>::zeros();
    match L {
        2 => {
            let o = 1 - k;
            let a0 = project(&cols[0])[o];
            let a1 = project(&cols[1])[o];
            let len = a1 - a0;
            mu[0] = a1 / len;
            mu[1] = -a0 / len;
        }
        3 => {
            let (i, j) = match k {
                0 => (1, 2),
                1 => (2, 0),
                _ => (0, 1),
            };
            let mut q = [[0.0; 2]; 3];
            for (m, c) in cols.iter().enumerate().take(3) {
                let t = c[k] / yk;
                q[m] = [c[i] - y[i] * t, c[j] - y[j] * t];
            }
            let s = [cross2(q[1], q[2]), cross2(q[2], q[0]), cross2(q[0], q[1])];
            let total = s[0] + s[1] + s[2];
            for m in 0..3 {
                mu[m] = s[m] / total;
            }
        }
        _ => {
            let mut a = DMatrix::<f64>::zeros(L, L);
            for (m, c) in cols.iter().enumerate() {
                let q = project(c);
                let mut row = 0;
                for d in (0..L).filter(|&d| d != k) {
                    a[(row, m)] = q[d];
                    row += 1;
                }
                a[(L - 1, m)] = 1.0;
            }
            let mut rhs = DVector::<f64>::zeros(L);
            rhs[L - 1] = 1.0;
            let x = a.lu().solve(&rhs).ok_or(SimplexError::SingularBasis)?;
            mu.copy_from_slice(x.as_slice());
        }
    }
    if mu.iter().all(|v| v.is_finite()) {
        Ok(mu)
    } else {
        Err(SimplexError::SingularBasis)
    }
}

/// `(Z⁻¹z_k, Z⁻¹p)` by explicit inversion, unnormalized. Reference route for
/// cross-checks; loses accuracy as `Z` becomes ill-conditioned.
pub fn plain_coefficients<const L: usize>(
    cols: &[Vector<L>; L],
    z_k: &Vector<L>,
    p: &Vector<L>,
) -> Result<(Vector<L>, Vector<L>), SimplexError> {
    let inv = inverse(&SMatrix::<f64, L, L>::from_columns(cols)).ok_or(SimplexError::SingularBasis)?;
    Ok((inv * z_k, inv * p))
}

fn inverse<const L: usize>(m: &SMatrix<f64, L, L>) -> Option<SMatrix<f64, L, L>> {
    let inv = dense(m).try_inverse()?;
    Some(SMatrix::<f64, L, L>::from_column_slice(inv.as_slice()))
}

/// Asserts that the plain route selects an equivalent outgoing column when
/// `Z` is well conditioned.
#[cfg(debug_assertions)]
pub(super) fn debug_cross_check<const L: usize>(
    cols: &[Vector<L>; L],
    z_in: &Vector<L>,
    p: &Vector<L>,
    out: usize,
) {
    let z = SMatrix::<f64, L, L>::from_columns(cols);
    let Some(inv) = inverse(&z) else { return };
    let cond = z.norm() * inv.norm();
    if !(cond < 1e8) {
        return;
    }
    let nu_tilde = inv * z_in;
    let nu_star = inv * p;
    let max_tilde = nu_tilde.max();
    if !(max_tilde > 0.0) {
        return;
    }
    let ratio = |m: usize| nu_star[m].max(0.0) / nu_tilde[m];
    let threshold = 1e-6 * max_tilde;
    let best = (0..L)
        .filter(|&m| nu_tilde[m] > threshold)
        .map(ratio)
        .fold(f64::INFINITY, f64::min);
    if nu_tilde[out] <= threshold {
        return;
    }
    let tol = 1e-6 * (best + nu_star.amax() / max_tilde);
    debug_assert!(
        ratio(out) <= best + tol,
        "ratio test disagrees with plain route: out={out}, ratio={}, best={best}",
        ratio(out)
    );
}
