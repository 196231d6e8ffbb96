//! Ring generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use loftgen_core::geom::{Point3, Ring};
use rand::seq::SliceRandom;
use rand::Rng;

/// Rotation plus translation.
#[derive(Debug, Clone, Copy)]
pub struct Rigid {
    pub rows: [[f64; 3]; 3],
    pub shift: Point3,
}

impl Rigid {
    pub fn apply(&self, p: Point3) -> Point3 {
        let r = &self.rows;
        Point3::new(
            r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z,
        ) + self.shift
    }

    pub fn ring(&self, ring: &Ring) -> Ring {
        ring.map(|p| self.apply(p))
    }
}

/// Uniformly random rotation (from a random unit quaternion) and a shift.
pub fn random_rigid(rng: &mut impl Rng, max_shift: f64) -> Rigid {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (a * (TAU * u2).sin(), a * (TAU * u2).cos(), b * (TAU * u3).sin(), b * (TAU * u3).cos());
    let rows = [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ];
    let mut s = || rng.random_range(-max_shift..=max_shift);
    Rigid { rows, shift: Point3::new(s(), s(), s()) }
}

fn sorted_angles(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    // spread angles so no two coincide
    let mut a: Vec<f64> = (0..n).map(|k| (k as f64 + rng.random_range(0.1..0.9)) * TAU / n as f64).collect();
    a.sort_by(f64::total_cmp);
    a
}

/// Convex ring: points on an ellipse at sorted random angles.
pub fn ellipse_ring(rng: &mut impl Rng, n: usize) -> Vec<[f64; 2]> {
    let (rx, ry) = (rng.random_range(0.5..8.0), rng.random_range(0.5..8.0));
    sorted_angles(rng, n).into_iter().map(|t| [rx * t.cos(), ry * t.sin()]).collect()
}

/// Simple but usually non-convex: star-shaped with random radii.
pub fn star_ring(rng: &mut impl Rng, n: usize) -> Vec<[f64; 2]> {
    sorted_angles(rng, n)
        .into_iter()
        .map(|t| {
            let r = rng.random_range(0.4..2.0);
            [r * t.cos(), r * t.sin()]
        })
        .collect()
}

/// Convex ring with edge midpoints inserted, giving collinear runs.
pub fn collinear_ring(rng: &mut impl Rng, n: usize) -> Vec<[f64; 2]> {
    let base = ellipse_ring(rng, n.div_ceil(2).max(3));
    let mut out = Vec::new();
    for i in 0..base.len() {
        let (a, b) = (base[i], base[(i + 1) % base.len()]);
        out.push(a);
        if out.len() + (base.len() - i - 1) < n {
            out.push([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]);
        }
    }
    out
}

/// Random vertex order: mostly self-intersecting.
pub fn scrambled_ring(rng: &mut impl Rng, n: usize) -> Vec<[f64; 2]> {
    let mut pts = star_ring(rng, n);
    pts.shuffle(rng);
    pts
}

/// A simple ring with one spike that doubles back along an edge.
pub fn spiked_ring(rng: &mut impl Rng, n: usize) -> Vec<[f64; 2]> {
    let mut pts = ellipse_ring(rng, n.max(4) - 1);
    let (a, b) = (pts[0], pts[1]);
    let t = rng.random_range(0.2..0.8);
    pts.insert(2, [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]);
    pts
}

/// Lifts 2D points into a random plane in space.
pub fn embed(rng: &mut impl Rng, pts: &[[f64; 2]]) -> Ring {
    let rigid = random_rigid(rng, 20.0);
    Ring::new(pts.iter().map(|&[x, y]| rigid.apply(Point3::new(x, y, 0.0))).collect()).unwrap()
}

/// Simple rings of 4..=64 vertices: convex, collinear-run convex and star-shaped.
pub fn simple_ring(rng: &mut impl Rng) -> Ring {
    let n = rng.random_range(4..=64);
    let pts = match rng.random_range(0..3) {
        0 => ellipse_ring(rng, n),
        1 => collinear_ring(rng, n),
        _ => star_ring(rng, n),
    };
    embed(rng, &pts)
}

/// Any ring of 4..=64 vertices, including self-intersecting ones.
pub fn any_ring(rng: &mut impl Rng) -> Ring {
    let n = rng.random_range(4..=64);
    let pts = match rng.random_range(0..5) {
        0 => ellipse_ring(rng, n),
        1 => star_ring(rng, n),
        2 => spiked_ring(rng, n),
        _ => scrambled_ring(rng, n),
    };
    embed(rng, &pts)
}

// ---------------------------------------------------------------- oracles

fn in_plane(ring: &Ring) -> Vec<[f64; 2]> {
    // Newell normal, then any orthonormal basis of the plane
    let n = ring.len();
    let mut normal = Point3::ORIGIN;
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        normal = normal + Point3::new((a.y - b.y) * (a.z + b.z), (a.z - b.z) * (a.x + b.x), (a.x - b.x) * (a.y + b.y));
    }
    let normal = normal.normalized().unwrap();
    let helper = if normal.x.abs() < 0.9 { Point3::new(1.0, 0.0, 0.0) } else { Point3::new(0.0, 1.0, 0.0) };
    let u = normal.cross(helper).normalized().unwrap();
    let v = normal.cross(u);
    ring.iter().map(|&p| [p.dot(u), p.dot(v)]).collect()
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; strict hull without collinear points.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn point_segment_2d(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((p[0] - a[0] - t * dx).powi(2) + (p[1] - a[1] - t * dy).powi(2)).sqrt()
}

/// Convex iff every vertex lies on the boundary of the convex hull. Only
/// meaningful for simple rings.
pub fn hull_oracle_convex(ring: &Ring) -> bool {
    let pts = in_plane(ring);
    let hull = convex_hull(&pts);
    let scale = pts.iter().map(|p| p[0].abs().max(p[1].abs())).fold(1.0, f64::max);
    let h = hull.len();
    pts.iter().all(|&p| (0..h).any(|i| point_segment_2d(p, hull[i], hull[(i + 1) % h]) <= 1e-9 * scale))
}

/// Closest distance between segments `p1q1` and `p2q2` in space.
pub fn segment_distance(p1: Point3, q1: Point3, p2: Point3, q2: Point3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let (a, e, f) = (d1.dot(d1), d2.dot(d2), d2.dot(r));
    let c = d1.dot(r);
    let b = d1.dot(d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-18 * a * e { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    (p1 + d1 * s).distance(p2 + d2 * t)
}

fn point_segment_3d(p: Point3, a: Point3, b: Point3) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
    p.distance(a + d * t)
}

/// Exhaustive edge-pair test in space: non-adjacent edges closer than
/// 1e-9, or adjacent edges where one end lies back on the other edge.
pub fn segment_pair_oracle(ring: &Ring) -> bool {
    let n = ring.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // shared vertex: b == c or d == a
                let (x, shared, y) = if j == i + 1 { (a, b, d) } else { (c, a, b) };
                if point_segment_3d(y, x, shared) <= 1e-9 || point_segment_3d(x, shared, y) <= 1e-9 {
                    return true;
                }
            } else if segment_distance(a, b, c, d) <= 1e-9 {
                return true;
            }
        }
    }
    false
}

/// Sum of squared distances between `prev[i]` and `cur[(i + r) % m]`.
pub fn brute_twist(prev: &[Point3], cur: &[Point3], r: usize) -> f64 {
    let m = cur.len();
    (0..m).map(|i| {
        let (p, q) = (prev[i], cur[(i + r) % m]);
        (p.x - q.x).powi(2) + (p.y - q.y).powi(2) + (p.z - q.z).powi(2)
    }).sum()
}

/// Convex section in the xz plane at height `y`: random ellipse, offset,
/// start index and winding.
pub fn convex_section(rng: &mut impl Rng, y: f64) -> Ring {
    let n = rng.random_range(4..=24);
    let mut pts = ellipse_ring(rng, n);
    let (cx, cz) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    pts.rotate_left(rng.random_range(0..n));
    if rng.random_bool(0.5) {
        pts.reverse();
    }
    Ring::new(pts.iter().map(|&[x, z]| Point3::new(x + cx, y, z + cz)).collect()).unwrap()
}
