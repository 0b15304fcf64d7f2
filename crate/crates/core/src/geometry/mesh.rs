use std::collections::BTreeSet;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::shape::{argmax_dot, SupportEval};
use super::{GeometryError, Vector};
use crate::oracle::hull::convex_hull_3d;

/// Vertex count above which meshes switch from exhaustive scan to hill climbing.
pub const DEFAULT_HILL_CLIMB_THRESHOLD: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("mesh has no vertices")]
    Empty,
    #[error("adjacency has {got} rows for {expected} vertices")]
    AdjacencySize { expected: usize, got: usize },
    #[error("vertex {0} references neighbor {1} out of range")]
    IndexOutOfRange(usize, usize),
    #[error("adjacency is not symmetric: {0} lists {1} but not vice versa")]
    Asymmetric(usize, usize),
    #[error("point set is degenerate (coplanar or fewer than four points)")]
    Degenerate,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("json error: {0}")]
    Json(String),
    #[error("io error: {0}")]
    Io(String),
}

/// Outcome of a hill-climbing support query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClimbResult<const L: usize> {
    pub eval: SupportEval<L>,
    /// Vertex reached; pass it back as the next start hint.
    pub vertex: usize,
    /// Number of vertex dot products evaluated.
    pub visits: usize,
}

/// Convex vertex hull with a vertex adjacency graph.
#[derive(Debug, Clone)]
pub struct Mesh<const L: usize> {
    vertices: Vec<Vector<L>>,
    adjacency: Vec<Vec<u32>>,
    hill_climb_threshold: usize,
    verify_climb: bool,
    fingerprint: u64,
}

impl<const L: usize> Mesh<L> {
    /// Builds a mesh from vertices and a symmetric adjacency list.
    pub fn new(vertices: Vec<Vector<L>>, adjacency: Vec<Vec<u32>>) -> Result<Self, MeshError> {
        if vertices.is_empty() {
            return Err(MeshError::Empty);
        }
        if adjacency.len() != vertices.len() {
            return Err(MeshError::AdjacencySize {
                expected: vertices.len(),
                got: adjacency.len(),
            });
        }
        let n = vertices.len();
        for (i, nbrs) in adjacency.iter().enumerate() {
            for &j in nbrs {
                let j = j as usize;
                if j >= n {
                    return Err(MeshError::IndexOutOfRange(i, j));
                }
                if !adjacency[j].contains(&(i as u32)) {
                    return Err(MeshError::Asymmetric(i, j));
                }
            }
        }
        let mut h = DefaultHasher::new();
        for v in &vertices {
            for x in v.iter() {
                x.to_bits().hash(&mut h);
            }
        }
        adjacency.hash(&mut h);
        Ok(Self {
            vertices,
            adjacency,
            hill_climb_threshold: DEFAULT_HILL_CLIMB_THRESHOLD,
            verify_climb: cfg!(debug_assertions),
            fingerprint: h.finish(),
        })
    }

    /// Adjacency from polygon face edges (consecutive face indices).
    pub fn from_faces(vertices: Vec<Vector<L>>, faces: &[Vec<usize>]) -> Result<Self, MeshError> {
        let n = vertices.len();
        let mut sets = vec![BTreeSet::new(); n];
        for face in faces {
            for (k, &a) in face.iter().enumerate() {
                let b = face[(k + 1) % face.len()];
                if a >= n {
                    return Err(MeshError::IndexOutOfRange(b.min(n), a));
                }
                if b >= n {
                    return Err(MeshError::IndexOutOfRange(a, b));
                }
                if a != b {
                    sets[a].insert(b as u32);
                    sets[b].insert(a as u32);
                }
            }
        }
        Self::new(vertices, sets.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    /// Sets the vertex count above which hill climbing replaces the exhaustive scan.
    pub fn with_hill_climb_threshold(mut self, threshold: usize) -> Self {
        self.hill_climb_threshold = threshold;
        self
    }

    /// Cross-checks every climb against an exhaustive scan (on by default in debug builds).
    pub fn with_climb_verification(mut self, on: bool) -> Self {
        self.verify_climb = on;
        self
    }

    pub fn vertices(&self) -> &[Vector<L>] {
        &self.vertices
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn uses_hill_climbing(&self) -> bool {
        self.vertices.len() > self.hill_climb_threshold
    }

    /// Exhaustive scan; lowest index wins ties.
    pub fn support_exhaustive(&self, direction: &Vector<L>) -> (SupportEval<L>, usize) {
        let i = argmax_dot(&self.vertices, direction);
        (
            SupportEval {
                value: direction.dot(&self.vertices[i]),
                point: self.vertices[i],
            },
            i,
        )
    }

    /// Steepest-ascent walk over the vertex graph starting at `start`.
    pub fn hill_climb(
        &self,
        direction: &Vector<L>,
        start: usize,
    ) -> Result<ClimbResult<L>, GeometryError> {
        if direction.iter().all(|&x| x == 0.0) {
            return Err(GeometryError::ZeroDirection);
        }
        let mut current = if start < self.vertices.len() { start } else { 0 };
        let mut best = self.vertices[current].dot(direction);
        let mut visits = 1;
        loop {
            let mut next = current;
            for &j in &self.adjacency[current] {
                let d = self.vertices[j as usize].dot(direction);
                visits += 1;
                if d > best {
                    best = d;
                    next = j as usize;
                }
            }
            if next == current {
                break;
            }
            current = next;
        }
        if self.verify_climb {
            let (exhaustive, _) = self.support_exhaustive(direction);
            let tol = 1e-12 * exhaustive.value.abs().max(best.abs()).max(f64::MIN_POSITIVE);
            if exhaustive.value > best + tol {
                return Err(GeometryError::DisconnectedAdjacency {
                    reached: best,
                    expected: exhaustive.value,
                });
            }
        }
        Ok(ClimbResult {
            eval: SupportEval {
                value: best,
                point: self.vertices[current],
            },
            vertex: current,
            visits,
        })
    }
}

impl Mesh<3> {
    /// Convex hull of a point cloud; keeps only extreme points.
    pub fn from_points(points: &[Vector<3>]) -> Result<Self, MeshError> {
        let hull = convex_hull_3d(points).ok_or(MeshError::Degenerate)?;
        let (vertices, faces) = hull.compact(points);
        let faces: Vec<Vec<usize>> = faces.iter().map(|f| f.to_vec()).collect();
        Self::from_faces(vertices, &faces)
    }

    /// Parses the OFF subset: `OFF` header, counts line, vertex lines, face lines.
    /// With zero faces, adjacency comes from the computed hull.
    pub fn parse_off(text: &str) -> Result<Self, MeshError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, msg: &str| MeshError::Parse {
            line,
            msg: msg.to_string(),
        };
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
        let rest = header
            .strip_prefix("OFF")
            .ok_or_else(|| parse_err(hline, "missing OFF header"))?
            .trim();
        let (cline, counts) = if rest.is_empty() {
            lines.next().ok_or_else(|| parse_err(hline, "missing counts line"))?
        } else {
            (hline, rest)
        };
        let counts: Vec<usize> = counts
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(cline, "bad count")))
            .collect::<Result<_, _>>()?;
        if counts.len() < 2 {
            return Err(parse_err(cline, "expected vertex and face counts"));
        }
        let (nv, nf) = (counts[0], counts[1]);
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines.next().ok_or_else(|| parse_err(cline, "missing vertex line"))?;
            let xs: Vec<f64> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(ln, "bad coordinate")))
                .collect::<Result<_, _>>()?;
            if xs.len() < 3 {
                return Err(parse_err(ln, "vertex needs three coordinates"));
            }
            vertices.push(Vector::<3>::new(xs[0], xs[1], xs[2]));
        }
        let mut faces = Vec::with_capacity(nf);
        for _ in 0..nf {
            let (ln, l) = lines.next().ok_or_else(|| parse_err(cline, "missing face line"))?;
            let idx: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(ln, "bad face index")))
                .collect::<Result<_, _>>()?;
            let k = *idx.first().ok_or_else(|| parse_err(ln, "empty face"))?;
            if idx.len() < k + 1 {
                return Err(parse_err(ln, "face has fewer indices than declared"));
            }
            faces.push(idx[1..=k].to_vec());
        }
        if faces.is_empty() {
            Self::from_points(&vertices)
        } else {
            Self::from_faces(vertices, &faces)
        }
    }

    /// Parses `{"vertices": [[x,y,z],...], "faces": [[i,j,k],...]}`; faces optional.
    pub fn parse_json(text: &str) -> Result<Self, MeshError> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: Vec<[f64; 3]>,
            #[serde(default)]
            faces: Option<Vec<Vec<usize>>>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| MeshError::Json(e.to_string()))?;
        let vertices: Vec<Vector<3>> = raw.vertices.iter().map(|v| Vector::<3>::from(*v)).collect();
        match raw.faces {
            Some(faces) if !faces.is_empty() => Self::from_faces(vertices, &faces),
            _ => Self::from_points(&vertices),
        }
    }

    /// Loads `.off` or `.json` by extension.
    pub fn load(path: &Path) -> Result<Self, MeshError> {
        let text = std::fs::read_to_string(path).map_err(|e| MeshError::Io(e.to_string()))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::parse_json(&text),
            _ => Self::parse_off(&text),
        }
    }
}
