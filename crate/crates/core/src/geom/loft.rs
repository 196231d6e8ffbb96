//! Skinning an ordered stack of closed sections into a triangle mesh.
//!
//! Rings are brought to a common size by subdividing their longest edges
//! (original vertices are kept, so corners survive), wound counterclockwise
//! about the stacking direction, and cyclically rotated so each ring starts
//! where it best matches the one below it.

use super::predicates::cross2;
use super::{GeomError, LoftedMesh, Mesh, PlaneFrame, Point3, Ring, TOL};
use crate::exec::{self, Execution};

/// Sum of squared distances between `prev[i]` and `cur[(i + rotation) % m]`.
pub fn twist_metric(prev: &[Point3], cur: &[Point3], rotation: usize) -> f64 {
    let m = cur.len();
    prev.iter().enumerate().map(|(i, p)| p.distance_sq(cur[(i + rotation) % m])).sum()
}

/// Rotation of `cur` with the least twist against `prev`; ties go to the
/// smallest rotation.
pub fn best_rotation(exec: Execution, prev: &[Point3], cur: &[Point3]) -> (usize, f64) {
    exec::argmin_index(exec, cur.len(), |r| twist_metric(prev, cur, r)).unwrap_or((0, 0.0))
}

/// Rings after resampling, orientation and alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedStack {
    /// Unit stacking direction.
    pub normal: Point3,
    /// Resampled, counterclockwise rings before rotation.
    pub oriented: Vec<Vec<Point3>>,
    /// Start offset chosen for each ring; the first is always 0.
    pub rotations: Vec<usize>,
    /// `oriented[k]` rotated by `rotations[k]`.
    pub aligned: Vec<Vec<Point3>>,
}

impl PreparedStack {
    pub fn ring_size(&self) -> usize {
        self.aligned.first().map_or(0, Vec::len)
    }
}

/// Inserts points on the longest edges until the ring has `target` vertices.
fn resample(ring: &[Point3], target: usize) -> Vec<Point3> {
    let n = ring.len();
    if n >= target {
        return ring.to_vec();
    }
    let lengths: Vec<f64> = (0..n).map(|i| ring[i].distance(ring[(i + 1) % n])).collect();
    let mut pieces = vec![1usize; n];
    for _ in n..target {
        let mut best = 0;
        for i in 1..n {
            if lengths[i] / pieces[i] as f64 > lengths[best] / pieces[best] as f64 {
                best = i;
            }
        }
        pieces[best] += 1;
    }
    let mut out = Vec::with_capacity(target);
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        for k in 0..pieces[i] {
            out.push(a.lerp(b, k as f64 / pieces[i] as f64));
        }
    }
    out
}

pub fn prepare_stack(exec: Execution, rings: &[Ring]) -> Result<PreparedStack, GeomError> {
    if rings.len() < 2 {
        return Err(GeomError::TooFewSections(rings.len()));
    }
    let base = PlaneFrame::fit(&rings[0]).ok_or(GeomError::DegenerateSection { index: 0 })?;
    let c0 = rings[0].centroid();
    let mut normal = base.normal;
    if (rings[1].centroid() - c0).dot(normal) < 0.0 {
        normal = -normal;
    }
    let mut last = 0.0;
    for (index, ring) in rings.iter().enumerate().skip(1) {
        let level = (ring.centroid() - c0).dot(normal);
        if level <= last + TOL {
            return Err(GeomError::NonMonotoneStack { index });
        }
        last = level;
    }
    let frame = PlaneFrame::canonical(c0, normal).ok_or(GeomError::DegenerateSection { index: 0 })?;
    let size = rings.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut oriented = Vec::with_capacity(rings.len());
    for (index, ring) in rings.iter().enumerate() {
        let flat: Vec<[f64; 2]> = ring.iter().map(|&p| frame.project(p)).collect();
        let n = flat.len();
        let area2: f64 = (0..n).map(|i| cross2(flat[i], flat[(i + 1) % n])).sum();
        if area2.abs() * 0.5 <= 1e-12 {
            return Err(GeomError::DegenerateSection { index });
        }
        let mut pts = ring.points().to_vec();
        if area2 < 0.0 {
            pts[1..].reverse();
        }
        oriented.push(resample(&pts, size));
    }
    let mut rotations = vec![0];
    let mut aligned = vec![oriented[0].clone()];
    for cur in &oriented[1..] {
        let prev = aligned.last().expect("first ring pushed above");
        let (r, _) = best_rotation(exec, prev, cur);
        rotations.push(r);
        aligned.push((0..size).map(|i| cur[(i + r) % size]).collect());
    }
    Ok(PreparedStack { normal, oriented, rotations, aligned })
}

/// Lofts the sections in order, optionally closing both ends with fans.
pub fn loft(sections: &[Ring], cap_ends: bool) -> Result<LoftedMesh, GeomError> {
    loft_with(Execution::Auto, sections, cap_ends)
}

pub fn loft_with(exec: Execution, sections: &[Ring], cap_ends: bool) -> Result<LoftedMesh, GeomError> {
    let stack = prepare_stack(exec, sections)?;
    let m = stack.ring_size();
    let t = stack.aligned.len();
    let mut vertices: Vec<Point3> = stack.aligned.iter().flatten().copied().collect();
    let mut triangles = Vec::with_capacity(2 * m * (t - 1) + if cap_ends { 2 * m } else { 0 });
    for k in 0..t - 1 {
        for i in 0..m {
            let j = (i + 1) % m;
            let (a, b) = (k * m + i, k * m + j);
            let (c, e) = ((k + 1) * m + j, (k + 1) * m + i);
            triangles.push([a, b, c]);
            triangles.push([a, c, e]);
        }
    }
    if cap_ends {
        let bottom = vertices.len();
        vertices.push(Point3::mean(&stack.aligned[0]));
        let top = vertices.len();
        vertices.push(Point3::mean(&stack.aligned[t - 1]));
        let last = (t - 1) * m;
        for i in 0..m {
            triangles.push([bottom, (i + 1) % m, i]);
        }
        for i in 0..m {
            triangles.push([top, last + i, last + (i + 1) % m]);
        }
    }
    Ok(LoftedMesh { mesh: Mesh::new(vertices, triangles), section_count: t, ring_size: m })
}
