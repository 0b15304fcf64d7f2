//! Convex hulls in two and three dimensions.
//!
//! Used to build mesh adjacency, to compute exact polytope inradii and as an
//! independent ray-intersection reference. Quadratic time; fine for a few
//! thousand points.

use std::collections::HashMap;

use nalgebra::{Vector2, Vector3};

use crate::geometry::Vector;

/// 3D convex hull as outward-oriented triangles over the input point indices.
#[derive(Debug, Clone)]
pub struct Hull3 {
    /// Indices of hull vertices into the input slice, ascending.
    pub vertices: Vec<usize>,
    /// Counter-clockwise (outward) triangles, indices into the input slice.
    pub faces: Vec<[usize; 3]>,
    /// Unit outward normal and offset of each face: `⟨n, z⟩ <= d` inside.
    pub planes: Vec<(Vector3<f64>, f64)>,
}

impl Hull3 {
    /// Hull vertices and faces re-indexed to a compact vertex list.
    pub fn compact(&self, points: &[Vector3<f64>]) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
        let mut remap = HashMap::with_capacity(self.vertices.len());
        let verts: Vec<Vector3<f64>> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(new, &old)| {
                remap.insert(old, new);
                points[old]
            })
            .collect();
        let faces = self
            .faces
            .iter()
            .map(|f| [remap[&f[0]], remap[&f[1]], remap[&f[2]]])
            .collect();
        (verts, faces)
    }

    /// Distance from `center` to the nearest facet plane (negative if outside).
    pub fn inradius_at(&self, center: &Vector3<f64>) -> f64 {
        self.planes
            .iter()
            .map(|(n, d)| d - n.dot(center))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `β` with `β·dir` inside the hull (origin assumed interior).
    pub fn ray_exit(&self, dir: &Vector3<f64>) -> f64 {
        self.planes
            .iter()
            .filter_map(|(n, d)| {
                let s = n.dot(dir);
                (s > 0.0).then(|| d / s)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

struct Face {
    v: [usize; 3],
    n: Vector3<f64>,
    d: f64,
    alive: bool,
}

fn make_face(points: &[Vector3<f64>], v: [usize; 3]) -> Face {
    let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
    let raw = (b - a).cross(&(c - a));
    let n = raw / raw.norm();
    Face {
        v,
        n,
        d: n.dot(&a),
        alive: true,
    }
}

/// Incremental 3D convex hull. Returns `None` for degenerate (flat) inputs.
pub fn convex_hull_3d(points: &[Vector3<f64>]) -> Option<Hull3> {
    if points.len() < 4 {
        return None;
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let eps = 1e-10 * scale;

    // initial tetrahedron from well-spread points
    let i0 = (0..points.len())
        .min_by(|&a, &b| points[a].x.total_cmp(&points[b].x))
        .unwrap();
    let i1 = farthest(points, |p| (p - points[i0]).norm());
    let axis = (points[i1] - points[i0]).normalize();
    let i2 = farthest(points, |p| {
        let w = p - points[i0];
        (w - axis * w.dot(&axis)).norm()
    });
    let nrm = (points[i1] - points[i0]).cross(&(points[i2] - points[i0]));
    if nrm.norm() <= eps * scale {
        return None;
    }
    let nrm = nrm.normalize();
    let i3 = farthest(points, |p| (p - points[i0]).dot(&nrm).abs());
    if (points[i3] - points[i0]).dot(&nrm).abs() <= eps {
        return None;
    }
    let interior = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;

    let mut faces: Vec<Face> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let add_face = |faces: &mut Vec<Face>, edges: &mut HashMap<(usize, usize), usize>, v: [usize; 3]| {
        let f = make_face(points, v);
        let id = faces.len();
        for k in 0..3 {
            edges.insert((v[k], v[(k + 1) % 3]), id);
        }
        faces.push(f);
    };
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let f = make_face(points, tri);
        let v = if f.n.dot(&interior) > f.d {
            [tri[0], tri[2], tri[1]]
        } else {
            tri
        };
        add_face(&mut faces, &mut edges, v);
    }

    let mut visible = Vec::new();
    let mut stack = Vec::new();
    let mut mark: Vec<u32> = Vec::new();
    let mut stamp = 0u32;
    for (pi, p) in points.iter().enumerate() {
        if pi == i0 || pi == i1 || pi == i2 || pi == i3 {
            continue;
        }
        let mut seed = None;
        let mut best = eps;
        for (fi, f) in faces.iter().enumerate() {
            if f.alive {
                let dist = f.n.dot(p) - f.d;
                if dist > best {
                    best = dist;
                    seed = Some(fi);
                }
            }
        }
        let Some(seed) = seed else { continue };

        stamp += 1;
        mark.resize(faces.len(), 0);
        visible.clear();
        stack.clear();
        stack.push(seed);
        mark[seed] = stamp;
        while let Some(fi) = stack.pop() {
            visible.push(fi);
            let v = faces[fi].v;
            for k in 0..3 {
                if let Some(&nb) = edges.get(&(v[(k + 1) % 3], v[k])) {
                    if mark[nb] != stamp && faces[nb].alive && faces[nb].n.dot(p) - faces[nb].d > eps {
                        mark[nb] = stamp;
                        stack.push(nb);
                    }
                }
            }
        }
        let mut horizon = Vec::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                let twin = edges.get(&(b, a)).copied();
                if twin.map_or(true, |t| mark.get(t).copied() != Some(stamp)) {
                    horizon.push((a, b));
                }
            }
        }
        for &fi in &visible {
            faces[fi].alive = false;
            let v = faces[fi].v;
            for k in 0..3 {
                let key = (v[k], v[(k + 1) % 3]);
                if edges.get(&key) == Some(&fi) {
                    edges.remove(&key);
                }
            }
        }
        for (a, b) in horizon {
            add_face(&mut faces, &mut edges, [a, b, pi]);
        }
    }

    let alive: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    let mut vertices: Vec<usize> = alive.iter().flat_map(|f| f.v).collect();
    vertices.sort_unstable();
    vertices.dedup();
    Some(Hull3 {
        vertices,
        faces: alive.iter().map(|f| f.v).collect(),
        planes: alive.iter().map(|f| (f.n, f.d)).collect(),
    })
}

fn farthest(points: &[Vector3<f64>], key: impl Fn(&Vector3<f64>) -> f64) -> usize {
    let mut best = 0;
    let mut best_val = f64::MIN;
    for (i, p) in points.iter().enumerate() {
        let v = key(p);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    best
}

/// 2D hull (Andrew's monotone chain), counter-clockwise, collinear points dropped.
pub fn convex_hull_2d(points: &[Vector2<f64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .x
            .total_cmp(&points[b].x)
            .then(points[a].y.total_cmp(&points[b].y))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| {
        let (o, a, b) = (points[o], points[a], points[b]);
        (a - o).perp(&(b - o))
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= 0.0 {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// Outward unit normals and offsets of a counter-clockwise 2D hull.
pub fn hull_2d_planes(points: &[Vector2<f64>], hull: &[usize]) -> Vec<(Vector2<f64>, f64)> {
    (0..hull.len())
        .map(|k| {
            let a = points[hull[k]];
            let b = points[hull[(k + 1) % hull.len()]];
            let e = b - a;
            let n = Vector2::new(e.y, -e.x).normalize();
            (n, n.dot(&a))
        })
        .collect()
}

fn to3<const L: usize>(v: &Vector<L>) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

fn to2<const L: usize>(v: &Vector<L>) -> Vector2<f64> {
    Vector2::new(v[0], v[1])
}

/// Outward facet planes of the hull of `points` (2D or 3D only).
pub fn facet_planes<const L: usize>(points: &[Vector<L>]) -> Option<Vec<(Vector<L>, f64)>> {
    match L {
        2 => {
            let pts: Vec<Vector2<f64>> = points.iter().map(to2).collect();
            let hull = convex_hull_2d(&pts);
            if hull.len() < 3 {
                return None;
            }
            Some(
                hull_2d_planes(&pts, &hull)
                    .into_iter()
                    .map(|(n, d)| (Vector::<L>::from_fn(|i, _| n[i]), d))
                    .collect(),
            )
        }
        3 => {
            let pts: Vec<Vector3<f64>> = points.iter().map(to3).collect();
            let hull = convex_hull_3d(&pts)?;
            Some(
                hull.planes
                    .into_iter()
                    .map(|(n, d)| (Vector::<L>::from_fn(|i, _| n[i]), d))
                    .collect(),
            )
        }
        _ => None,
    }
}

/// Exact inradius of `conv(points)` at `center` (2D or 3D only).
pub fn polytope_inradius<const L: usize>(points: &[Vector<L>], center: &Vector<L>) -> Option<f64> {
    let planes = facet_planes(points)?;
    Some(
        planes
            .iter()
            .map(|(n, d)| d - n.dot(center))
            .fold(f64::INFINITY, f64::min),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cube_corners() -> Vec<Vector3<f64>> {
        let mut v = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    v.push(Vector3::new(x, y, z));
                }
            }
        }
        v
    }

    #[test]
    fn cube_hull() {
        let mut pts = cube_corners();
        pts.push(Vector3::new(0.1, 0.2, -0.3));
        let h = convex_hull_3d(&pts).unwrap();
        assert_eq!(h.vertices, (0..8).collect::<Vec<_>>());
        assert_eq!(h.faces.len(), 12);
        assert!((h.inradius_at(&Vector3::zeros()) - 1.0).abs() < 1e-12);
        assert!((h.ray_exit(&Vector3::new(0.5, 0.0, 0.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn random_sphere_points_all_extreme_and_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Vector3<f64>> = (0..400)
            .map(|_| {
                let v = Vector3::new(
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                );
                v.normalize()
            })
            .collect();
        let h = convex_hull_3d(&pts).unwrap();
        assert_eq!(h.vertices.len(), 400);
        // Euler: F = 2V - 4 for a triangulated sphere
        assert_eq!(h.faces.len(), 2 * 400 - 4);
        for (n, d) in &h.planes {
            for p in &pts {
                assert!(n.dot(p) <= d + 1e-9);
            }
        }
    }

    #[test]
    fn flat_input_is_degenerate() {
        let pts = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
        ];
        assert!(convex_hull_3d(&pts).is_none());
    }

    #[test]
    fn square_hull_2d() {
        let pts = vec![
            Vector2::new(1.0, 1.0),
            Vector2::new(0.0, 0.0),
            Vector2::new(-1.0, 1.0),
            Vector2::new(1.0, -1.0),
            Vector2::new(-1.0, -1.0),
            Vector2::new(1.0, 0.0),
        ];
        let h = convex_hull_2d(&pts);
        assert_eq!(h.len(), 4);
        let r = polytope_inradius::<2>(&pts, &Vector2::zeros()).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }
}
