use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{GeomError, Point3, MIN_TRIANGLE_AREA};

type EdgeCounts = HashMap<(usize, usize), usize>;

/// Indexed triangle mesh; triangles wind counterclockwise seen from outside.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[usize; 3]>,
}

/// Topology and geometry summary of a mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    pub vertex_count: usize,
    pub triangle_count: usize,
    pub edge_count: usize,
    /// Edges with one incident triangle.
    pub boundary_edges: usize,
    /// Edges with three or more incident triangles.
    pub nonmanifold_edges: usize,
    pub orientation_consistent: bool,
    pub euler_characteristic: i64,
    pub degenerate_triangles: usize,
    pub components: usize,
    pub signed_volume: f64,
}

impl MeshReport {
    /// Every edge borders exactly two triangles.
    pub fn edge_manifold(&self) -> bool {
        self.boundary_edges == 0 && self.nonmanifold_edges == 0
    }

    /// Closed, consistently oriented, non-degenerate, outward-facing.
    pub fn watertight(&self) -> bool {
        self.triangle_count > 0
            && self.edge_manifold()
            && self.orientation_consistent
            && self.degenerate_triangles == 0
            && self.signed_volume > 0.0
    }
}

impl Mesh {
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Self {
        Self { vertices, triangles }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Appends another mesh, shifting its indices.
    pub fn append(&mut self, other: &Mesh) {
        let base = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(other.triangles.iter().map(|t| t.map(|i| i + base)));
    }

    pub fn triangle_area(&self, t: [usize; 3]) -> f64 {
        let [a, b, c] = t.map(|i| self.vertices[i]);
        (b - a).cross(c - a).norm() * 0.5
    }

    pub fn indices_in_range(&self) -> bool {
        self.triangles.iter().flatten().all(|&i| i < self.vertices.len())
    }

    /// Incident triangle count per undirected edge, plus directed edge counts.
    fn edge_counts(&self) -> (EdgeCounts, EdgeCounts) {
        let mut undirected = HashMap::new();
        let mut directed = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *undirected.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                *directed.entry((a, b)).or_insert(0) += 1;
            }
        }
        (undirected, directed)
    }

    pub fn edge_count(&self) -> usize {
        self.edge_counts().0.len()
    }

    /// Connected components over shared vertices, counting only triangles.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for t in &self.triangles {
            let r0 = find(&mut parent, t[0]);
            for &v in &t[1..] {
                let r = find(&mut parent, v);
                parent[r] = r0;
            }
        }
        let mut roots: Vec<usize> = self.triangles.iter().map(|t| find(&mut parent, t[0])).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Divergence-theorem volume; positive when triangles face outward.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    pub fn check(&self) -> MeshReport {
        if !self.indices_in_range() {
            return MeshReport {
                vertex_count: self.vertices.len(),
                triangle_count: self.triangles.len(),
                edge_count: 0,
                boundary_edges: 0,
                nonmanifold_edges: 0,
                orientation_consistent: false,
                euler_characteristic: 0,
                degenerate_triangles: self.triangles.len(),
                components: 0,
                signed_volume: 0.0,
            };
        }
        let (undirected, directed) = self.edge_counts();
        let v = self.vertices.len() as i64;
        let e = undirected.len() as i64;
        let f = self.triangles.len() as i64;
        MeshReport {
            vertex_count: self.vertices.len(),
            triangle_count: self.triangles.len(),
            edge_count: undirected.len(),
            boundary_edges: undirected.values().filter(|&&c| c == 1).count(),
            nonmanifold_edges: undirected.values().filter(|&&c| c > 2).count(),
            orientation_consistent: directed.values().all(|&c| c == 1),
            euler_characteristic: v - e + f,
            degenerate_triangles: self
                .triangles
                .iter()
                .filter(|t| t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || self.triangle_area(**t) <= MIN_TRIANGLE_AREA)
                .count(),
            components: self.components(),
            signed_volume: self.signed_volume(),
        }
    }
}

/// A mesh produced by lofting, with the stack dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoftedMesh {
    #[serde(flatten)]
    pub mesh: Mesh,
    pub section_count: usize,
    pub ring_size: usize,
}

impl std::ops::Deref for LoftedMesh {
    type Target = Mesh;
    fn deref(&self) -> &Mesh {
        &self.mesh
    }
}

/// ASCII OBJ with six decimals per coordinate and 1-based face indices.
pub fn export_obj(mesh: &Mesh) -> Result<String, GeomError> {
    if mesh.triangles.is_empty() {
        return Err(GeomError::EmptyMesh);
    }
    if !mesh.indices_in_range() {
        return Err(GeomError::InvalidArgument("triangle index out of range".into()));
    }
    let mut out = String::with_capacity(mesh.vertices.len() * 36 + mesh.triangles.len() * 16);
    for p in &mesh.vertices {
        let _ = writeln!(out, "v {:.6} {:.6} {:.6}", p.x, p.y, p.z);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    Ok(out)
}
