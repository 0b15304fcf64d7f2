use super::*;
use nalgebra::{Matrix3, Vector2, Vector3};
use num::{BigRational, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn entry<const L: usize>(index: i64, z: Vector<L>) -> StoreEntry<L> {
    StoreEntry {
        index,
        z,
        witness1: z,
        witness2: Vector::<L>::zeros(),
    }
}

fn store_of<const L: usize>(points: &[Vector<L>]) -> VertexStore<L> {
    let mut s = VertexStore::new();
    for (i, z) in points.iter().enumerate() {
        s.push(entry(i as i64, *z));
    }
    s
}

/// Minimum `Σν` over all feasible `L`-subsets, by Cramer's rule.
fn exhaustive_objective<const L: usize>(points: &[Vector<L>], p: &Vector<L>) -> Option<f64> {
    fn det<const L: usize>(cols: &[Vector<L>]) -> f64 {
        nalgebra::DMatrix::<f64>::from_fn(L, L, |i, j| cols[j][i]).determinant()
    }
    let n = points.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..L).collect();
    loop {
        let cols: Vec<Vector<L>> = idx.iter().map(|&i| points[i]).collect();
        let d = det::<L>(&cols);
        let scale: f64 = cols.iter().map(|c| c.norm()).product();
        if d.abs() > 1e-12 * scale {
            let nu: Vec<f64> = (0..L)
                .map(|m| {
                    let mut c = cols.clone();
                    c[m] = *p;
                    det::<L>(&c) / d
                })
                .collect();
            if nu.iter().all(|&v| v >= -1e-12) {
                let obj: f64 = nu.iter().sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // next combination
        let mut i = L;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < n - L + i {
                idx[i] += 1;
                for j in i + 1..L {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn first_feasible_basis<const L: usize>(
    store: &VertexStore<L>,
    p: &Vector<L>,
) -> Option<Basis<L>> {
    let n = store.len();
    let mut idx: Vec<usize> = (0..L).collect();
    loop {
        let slots: [usize; L] = idx.clone().try_into().unwrap();
        if let Ok(b) = Basis::from_slots(store, slots, p) {
            if b.mu_star.iter().all(|&m| m >= -1e-12) {
                return Some(b);
            }
        }
        let mut i = L;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < n - L + i {
                idx[i] += 1;
                for j in i + 1..L {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn assert_basis_invariants<const L: usize>(store: &VertexStore<L>, b: &Basis<L>, p: &Vector<L>) {
    let nu = b.nu_star();
    assert!(nu.iter().all(|&v| v >= -1e-12), "nu = {nu:?}");
    let recon: Vector<L> = (0..L).map(|m| store[b.slots[m]].z * nu[m]).sum();
    assert!((recon - p).norm() <= 1e-10 * p.norm(), "recon {recon:?} p {p:?}");
    assert!((nu.sum() - 1.0 / b.beta_lower).abs() <= 1e-9 / b.beta_lower);
    for &s in &b.slots {
        assert!((b.normal.dot(&store[s].z) - 1.0).abs() <= 1e-9);
    }
    assert!((b.normal.dot(p) * b.beta_lower - 1.0).abs() <= 1e-9);
}

#[test]
fn normal_examples() {
    let n = normal_from_basis(&[Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)]).unwrap();
    assert_eq!(n, Vector2::new(1.0, 1.0));
    let n = normal_from_basis(&[Vector2::new(2.0, 0.0), Vector2::new(0.0, 2.0)]).unwrap();
    assert_eq!(n, Vector2::new(0.5, 0.5));
}

#[test]
fn normal_residual_random_3d_and_4d() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let z = Matrix3::from_fn(|_, _| rng.random_range(-1.0..1.0)) + Matrix3::identity() * 2.0;
        let cols = [z.column(0).into(), z.column(1).into(), z.column(2).into()];
        let n = normal_from_basis::<3>(&cols).unwrap();
        let res = z.transpose() * n - Vector3::repeat(1.0);
        assert!(res.amax() < 1e-10);
    }
    for _ in 0..50 {
        let cols: [Vector<4>; 4] = std::array::from_fn(|i| {
            let mut v = Vector::<4>::from_fn(|_, _| rng.random_range(-1.0..1.0));
            v[i] += 3.0;
            v
        });
        let n = normal_from_basis(&cols).unwrap();
        for c in &cols {
            assert!((n.dot(c) - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn normal_residual_on_thin_facets() {
    // one point near the foot of the facet plane, two far points close together
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut worst = 0.0f64;
    for _ in 0..2000 {
        let n = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.5..1.5));
        let dist = 10f64.powf(rng.random_range(-3.0..0.0));
        let foot = n.normalize() * dist;
        let w = n.cross(&Vector3::new(rng.random_range(-1.0..1.0), 1.0, 0.3)).normalize();
        let w_perp = n.normalize().cross(&w);
        let far = 10f64.powf(rng.random_range(0.0..2.0)) * dist;
        let h = far * 10f64.powf(rng.random_range(-7.0..-4.0));
        let cols = [foot + w_perp * (0.1 * dist), foot + w * far, foot + w * far + w_perp * h];
        let Ok(lambda) = normal_from_basis(&cols) else { continue };
        for c in &cols {
            worst = worst.max((c.dot(&lambda) - 1.0).abs());
        }
    }
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn singular_basis_rejected() {
    let cols = [Vector2::new(1.0, 1.0), Vector2::new(2.0, 2.0)];
    assert_eq!(normal_from_basis(&cols), Err(SimplexError::SingularBasis));
    let cols = [Vector3::x(), Vector3::y(), Vector3::new(1.0, 1.0, 0.0)];
    assert_eq!(normal_from_basis(&cols), Err(SimplexError::SingularBasis));
    let cols = [Vector2::zeros(), Vector2::x()];
    assert_eq!(normal_from_basis(&cols), Err(SimplexError::SingularBasis));
}

#[test]
fn reduced_cost_examples() {
    let l = Vector2::new(1.0, 1.0);
    assert_eq!(reduced_cost(&l, &Vector2::new(2.0, 0.0)), -1.0);
    assert_eq!(reduced_cost(&l, &Vector2::new(0.3, 0.7)), 0.0);
    let cols = [Vector3::new(1.0, 0.2, 0.1), Vector3::new(-0.3, 1.0, 0.4), Vector3::new(0.2, 0.1, 2.0)];
    let n = normal_from_basis(&cols).unwrap();
    for c in &cols {
        assert!(reduced_cost(&n, c).abs() < 1e-10);
    }
}

#[test]
fn ratio_test_examples() {
    let pos = ratio_test(&Vector2::new(0.2, 0.5), &Vector2::new(0.1, 0.5)).unwrap();
    assert_eq!(pos, 1);
    let pos = ratio_test(&Vector2::new(0.0, 0.3), &Vector2::new(0.2, 0.1)).unwrap();
    assert_eq!(pos, 0);
    let pos = ratio_test(&(Vector2::new(0.2, 0.5) * 10.0), &(Vector2::new(0.1, 0.5) * 3.0)).unwrap();
    assert_eq!(pos, 1);
    assert_eq!(
        ratio_test(&Vector2::new(0.2, 0.5), &Vector2::new(-0.1, 0.0)),
        Err(SimplexError::NoPositivePivot)
    );
}

#[test]
fn robust_coefficients_identity_example() {
    let cols = [Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)];
    let (mt, ms) = robust_coefficients(&cols, &Vector2::new(3.0, 1.0), &Vector2::new(1.0, 1.0)).unwrap();
    assert!((mt - Vector2::new(0.75, 0.25)).amax() < 1e-15);
    assert!((ms - Vector2::new(0.5, 0.5)).amax() < 1e-15);
}

fn normalized<const L: usize>(v: Vector<L>) -> Vector<L> {
    v / v.sum()
}

#[test]
fn robust_matches_plain_on_well_conditioned_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    fn check<const L: usize>(rng: &mut ChaCha8Rng) {
        let cols: [Vector<L>; L] = std::array::from_fn(|i| {
            let mut v = Vector::<L>::from_fn(|_, _| rng.random_range(0.0..0.5));
            v[i] += 1.0;
            v
        });
        let zk = Vector::<L>::from_fn(|_, _| rng.random_range(0.1..1.0));
        let p = Vector::<L>::from_fn(|_, _| rng.random_range(0.1..1.0));
        let (mt, ms) = robust_coefficients(&cols, &zk, &p).unwrap();
        let (nt, ns) = plain_coefficients(&cols, &zk, &p).unwrap();
        assert!((mt - normalized(nt)).amax() < 1e-8, "{mt:?} vs {nt:?}");
        assert!((ms - normalized(ns)).amax() < 1e-8);
        if nt.max() > 0.0 && nt.sum() > 0.0 && ns.sum() > 0.0 {
            assert_eq!(ratio_test(&ms, &mt).unwrap(), ratio_test(&ns, &nt).unwrap());
        }
    }
    for _ in 0..300 {
        check::<2>(&mut rng);
        check::<3>(&mut rng);
        check::<4>(&mut rng);
        check::<5>(&mut rng);
    }
}

/// Exact `Z⁻¹y` over the rationals from the f64 inputs.
fn exact_solve(cols: &[Vector3<f64>; 3], y: &Vector3<f64>) -> Vec<BigRational> {
    let q = |x: f64| BigRational::from_float(x).unwrap();
    let mut a: Vec<Vec<BigRational>> = (0..3)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..3).map(|j| q(cols[j][i])).collect();
            row.push(q(y[i]));
            row
        })
        .collect();
    for c in 0..3 {
        let piv = (c..3).find(|&r| !a[r][c].is_zero()).unwrap();
        a.swap(c, piv);
        for r in 0..3 {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..4 {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
    }
    (0..3).map(|i| &a[i][3] / &a[i][i]).collect()
}

fn exact_ratio_argmin(nu_star: &[BigRational], nu_tilde: &[BigRational]) -> usize {
    let mut best: Option<(usize, BigRational)> = None;
    for m in 0..nu_star.len() {
        if nu_tilde[m].is_positive() {
            let s = if nu_star[m].is_negative() { BigRational::zero() } else { nu_star[m].clone() };
            let r = s / &nu_tilde[m];
            if best.as_ref().is_none_or(|(_, b)| r < *b) {
                best = Some((m, r));
            }
        }
    }
    best.unwrap().0
}

#[test]
fn ill_conditioned_ratio_test_matches_exact_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for _ in 0..400 {
        // three nearly parallel columns clustered around a common direction
        let base = Vector3::new(1.0, rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
        let e1 = Vector3::new(0.0, 1.0, 0.0);
        let e2 = Vector3::new(0.0, 0.0, 1.0);
        let h = 1e-10;
        let cols = [
            base + e1 * h * rng.random_range(0.5..1.0),
            base - e1 * h * rng.random_range(0.5..1.0) + e2 * h * rng.random_range(0.2..0.6),
            base - e2 * h * rng.random_range(0.5..1.0),
        ];
        let sv = Matrix3::from_columns(&cols).singular_values();
        let cond = sv.max() / sv.min();
        assert!(cond > 1e9, "cond {cond:e}");
        let p = (cols[0] + cols[1] + cols[2]) / 3.0
            + Vector3::new(0.0, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * (0.2 * h);
        let zk = base * 1.01 + Vector3::new(0.0, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * (3.0 * h);
        let ns = exact_solve(&cols, &p);
        let nt = exact_solve(&cols, &zk);
        if ns.iter().any(|v| v.is_negative()) || !nt.iter().any(|v| v.is_positive()) {
            continue;
        }
        let sum_t: BigRational = nt.iter().cloned().sum();
        if !sum_t.is_positive() {
            continue;
        }
        let (mt, ms) = robust_coefficients(&cols, &zk, &p).unwrap();
        assert_eq!(ratio_test(&ms, &mt).unwrap(), exact_ratio_argmin(&ns, &nt));
        checked += 1;
    }
    assert!(checked > 100, "only {checked} usable instances");
}

#[test]
fn solve_with_basis_only_store_is_identity() {
    let store = store_of(&[Vector2::new(1.0, -0.5), Vector2::new(1.0, 0.5)]);
    let p = Vector2::new(3.0, 0.0);
    let b = Basis::from_slots(&store, [0, 1], &p).unwrap();
    let (out, stats) = simplex_solve(&store, b, &p).unwrap();
    assert_eq!(out, b);
    assert_eq!(stats.pivots, 0);
}

#[test]
fn zero_reduced_cost_entry_keeps_basis() {
    let mut store = store_of(&[Vector2::new(1.0, -0.5), Vector2::new(1.0, 0.5)]);
    store.push(entry(7, Vector2::new(1.0, 0.1)));
    let p = Vector2::new(3.0, 0.0);
    let b = Basis::from_slots(&store, [0, 1], &p).unwrap();
    assert_eq!(reduced_cost(&b.normal, &store[2].z), 0.0);
    let (out, stats) = simplex_solve(&store, b, &p).unwrap();
    assert_eq!(out.slots, [0, 1]);
    assert_eq!(stats.pivots, 0);
}

#[test]
fn five_point_store_matches_enumeration() {
    let pts = [
        Vector2::new(1.0, -1.0),
        Vector2::new(0.5, 1.0),
        Vector2::new(2.0, 0.3),
        Vector2::new(1.5, -0.6),
        Vector2::new(-1.0, 0.2),
    ];
    let p = Vector2::new(1.0, 0.1);
    let store = store_of(&pts);
    let b = Basis::from_slots(&store, [0, 1], &p).unwrap();
    let (out, _) = simplex_solve(&store, b, &p).unwrap();
    let best = exhaustive_objective(&pts, &p).unwrap();
    assert!((1.0 / out.beta_lower - best).abs() <= 1e-10 * best);
    assert_basis_invariants(&store, &out, &p);
}

fn random_store_matches_enumeration<const L: usize>(rng: &mut ChaCha8Rng) -> bool {
    let n = rng.random_range(L + 1..=8);
    let p = Vector::<L>::from_fn(|_, _| rng.random_range(-1.0..1.0));
    if p.norm() < 0.1 {
        return false;
    }
    let pts: Vec<Vector<L>> = (0..n)
        .map(|_| Vector::<L>::from_fn(|_, _| rng.random_range(-1.0..1.0)) + p * 0.6)
        .collect();
    let store = store_of(&pts);
    let Some(start) = first_feasible_basis(&store, &p) else {
        return false;
    };
    let (out, _) = simplex_solve(&store, start, &p).unwrap();
    assert_basis_invariants(&store, &out, &p);
    assert!(1.0 / out.beta_lower <= 1.0 / start.beta_lower * (1.0 + 1e-12));
    let best = exhaustive_objective(&pts, &p).unwrap();
    assert!(
        (1.0 / out.beta_lower - best).abs() <= 1e-10 * best,
        "simplex {} vs exhaustive {best}",
        1.0 / out.beta_lower
    );
    true
}

#[test]
fn random_stores_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut n2, mut n3) = (0, 0);
    for _ in 0..2000 {
        n2 += random_store_matches_enumeration::<2>(&mut rng) as usize;
        n3 += random_store_matches_enumeration::<3>(&mut rng) as usize;
    }
    assert!(n2 > 300 && n3 > 300, "{n2} {n3}");
}

#[test]
fn newest_entry_enters_first() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut hits = 0;
    for _ in 0..500 {
        let p = Vector3::new(1.0, rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let pts: Vec<Vector3<f64>> = (0..6)
            .map(|_| p * 0.8 + Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let mut store = store_of(&pts);
        let Some(start) = first_feasible_basis(&store, &p) else { continue };
        let (opt, _) = simplex_solve(&store, start, &p).unwrap();
        let znew = p * 2.0 + Vector3::from_fn(|_, _| rng.random_range(-0.5..0.5));
        if reduced_cost(&opt.normal, &znew) >= -1e-9 {
            continue;
        }
        store.push(entry(100, znew));
        let (_, stats) = simplex_solve(&store, opt, &p).unwrap();
        assert_eq!(stats.first_entering, Some(100));
        hits += 1;
    }
    assert!(hits > 100);
}

#[test]
fn degenerate_cycling_instance_terminates() {
    // many points on the same supporting line through p's ray hit point
    let p = Vector2::new(1.0, 0.0);
    let mut pts = vec![Vector2::new(1.0, -1.0), Vector2::new(1.0, 1.0)];
    for i in 0..10 {
        let t = i as f64 / 10.0 - 0.45;
        pts.push(Vector2::new(1.0, t));
    }
    pts.push(Vector2::new(2.0, 0.0));
    let store = store_of(&pts);
    let b = Basis::from_slots(&store, [0, 1], &p).unwrap();
    let (out, _) = simplex_solve(&store, b, &p).unwrap();
    assert!((out.beta_lower - 2.0).abs() < 1e-12);
}

#[test]
fn store_retain_maps_positions() {
    let mut store = store_of(&[Vector2::x(), Vector2::y(), Vector2::new(1.0, 1.0)]);
    let map = store.retain_positions(&[0, 2]);
    assert_eq!(map, vec![Some(0), None, Some(1)]);
    assert_eq!(store.len(), 2);
    assert_eq!(store[1].index, 2);
    assert_eq!(store.position_of(2), Some(1));
}
