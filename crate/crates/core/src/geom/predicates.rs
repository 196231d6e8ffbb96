//! Section predicates. Rings are projected onto their own best-fit plane, so
//! every outcome is invariant under rigid motions of the input.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{GeomError, PlaneFrame, Point3, Ring, SectionConstraints, TOL};
use crate::exec::{self, Execution};

/// Number of points sampled on the inner circle.
pub const CIRCLE_SAMPLES: usize = 64;

pub(crate) type P2 = [f64; 2];

pub(crate) fn sub2(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn cross2(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dot2(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm2(a: P2) -> f64 {
    a[0].hypot(a[1])
}

/// Twice the signed area, positive for counterclockwise.
pub(crate) fn signed_area2(pts: &[P2]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| cross2(pts[i], pts[(i + 1) % n])).sum()
}

pub(crate) fn point_segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let ab = sub2(b, a);
    let len2 = dot2(ab, ab);
    let t = if len2 > 0.0 { (dot2(sub2(p, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm2(sub2(p, [a[0] + ab[0] * t, a[1] + ab[1] * t]))
}

pub(crate) fn segments_touch(a: P2, b: P2, c: P2, d: P2, tol: f64) -> bool {
    let d1 = cross2(sub2(b, a), sub2(c, a));
    let d2 = cross2(sub2(b, a), sub2(d, a));
    let d3 = cross2(sub2(d, c), sub2(a, c));
    let d4 = cross2(sub2(d, c), sub2(b, c));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    point_segment_distance(c, a, b) <= tol
        || point_segment_distance(d, a, b) <= tol
        || point_segment_distance(a, c, d) <= tol
        || point_segment_distance(b, c, d) <= tol
}

/// Ring projected to 2D along with the frame used.
pub(crate) fn project_ring(ring: &[Point3]) -> (PlaneFrame, Vec<P2>) {
    let frame = PlaneFrame::fit(ring).unwrap_or(PlaneFrame {
        origin: ring.first().copied().unwrap_or_default(),
        u: Point3::new(1.0, 0.0, 0.0),
        v: Point3::new(0.0, 1.0, 0.0),
        normal: Point3::new(0.0, 0.0, 1.0),
    });
    let pts = ring.iter().map(|&p| frame.project(p)).collect();
    (frame, pts)
}

fn is_convex_2d(pts: &[P2]) -> bool {
    let n = pts.len();
    let mut sign = 0.0;
    for i in 0..n {
        let e1 = sub2(pts[(i + 1) % n], pts[i]);
        let e2 = sub2(pts[(i + 2) % n], pts[(i + 1) % n]);
        let c = cross2(e1, e2);
        if c.abs() <= TOL * norm2(e1) * norm2(e2) {
            continue;
        }
        if sign == 0.0 {
            sign = c.signum();
        } else if c.signum() != sign {
            return false;
        }
    }
    true
}

/// True when all non-negligible turns share one sign.
pub fn is_convex(ring: &Ring) -> bool {
    is_convex_2d(&project_ring(ring).1)
}

fn edges_conflict(pts: &[P2], i: usize, j: usize) -> bool {
    let n = pts.len();
    let (a, b) = (pts[i], pts[(i + 1) % n]);
    let (c, d) = (pts[j], pts[(j + 1) % n]);
    if (i + 1) % n == j || (j + 1) % n == i {
        // adjacent edges only conflict when the second folds back over the first
        let (e1, e2) = if (i + 1) % n == j { (sub2(b, a), sub2(d, c)) } else { (sub2(d, c), sub2(b, a)) };
        return cross2(e1, e2).abs() <= TOL * norm2(e1) * norm2(e2) && dot2(e1, e2) < 0.0;
    }
    segments_touch(a, b, c, d, TOL)
}

fn self_intersects_2d(exec: Execution, pts: &[P2]) -> bool {
    let n = pts.len();
    exec::any_index(exec, n, |i| (i + 1..n).any(|j| edges_conflict(pts, i, j)))
}

/// True when two non-adjacent edges touch, or adjacent edges fold back.
pub fn self_intersects(ring: &Ring) -> bool {
    self_intersects_with(Execution::Auto, ring)
}

pub fn self_intersects_with(exec: Execution, ring: &Ring) -> bool {
    self_intersects_2d(exec, &project_ring(ring).1)
}

fn point_in_ring_2d(pts: &[P2], p: P2) -> bool {
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if point_segment_distance(p, a, b) <= TOL {
            return true;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Inside-or-on test for a point, after projecting it onto the ring plane.
pub fn point_in_ring(ring: &Ring, p: Point3) -> bool {
    let (frame, pts) = project_ring(ring);
    point_in_ring_2d(&pts, frame.project(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Containment {
    pub contains_inner_circle: Option<bool>,
    pub center_in_bound: Option<bool>,
}

/// Distance from the vertex centroid to the bound origin's foot on the ring
/// plane, so a stacked section is judged in its own plane.
fn center_offset(ring: &Ring, frame: &PlaneFrame, constraints: &SectionConstraints) -> f64 {
    ring.centroid().distance(frame.foot(constraints.center_bound_origin))
}

/// Checks the inner-circle and center-bound constraints that are set.
pub fn check_containment(ring: &Ring, constraints: &SectionConstraints) -> Result<Containment, GeomError> {
    constraints.check()?;
    let (frame, pts) = project_ring(ring);
    let contains_inner_circle = match constraints.inner_circle_radius {
        None => None,
        Some(r) => {
            if self_intersects_2d(Execution::Sequential, &pts) {
                return Err(GeomError::InvalidRing("ring self-intersects".into()));
            }
            let center = frame.foot(constraints.center_bound_origin);
            let circle = PlaneFrame::canonical(center, frame.normal)
                .ok_or_else(|| GeomError::InvalidRing("ring has no plane".into()))?;
            Some((0..CIRCLE_SAMPLES).all(|k| {
                let t = TAU * k as f64 / CIRCLE_SAMPLES as f64;
                let q = circle.lift([r * t.cos(), r * t.sin()]);
                point_in_ring_2d(&pts, frame.project(q))
            }))
        }
    };
    let center_in_bound = constraints
        .center_bound_radius
        .map(|r| center_offset(ring, &frame, constraints) <= r + TOL);
    Ok(Containment { contains_inner_circle, center_in_bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    NonConvex,
    SelfIntersect,
    InnerCircleMiss,
    CenterOutOfBound,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::NonConvex => "NON_CONVEX",
            ViolationCode::SelfIntersect => "SELF_INTERSECT",
            ViolationCode::InnerCircleMiss => "INNER_CIRCLE_MISS",
            ViolationCode::CenterOutOfBound => "CENTER_OUT_OF_BOUND",
        }
    }
}

impl std::fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub convex: bool,
    pub self_intersecting: bool,
    pub contains_inner_circle: Option<bool>,
    pub center_in_bound: Option<bool>,
    pub violations: Vec<Violation>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }
}

/// Runs every check the constraints ask for. Failures are report content.
pub fn validate_section(ring: &Ring, constraints: &SectionConstraints) -> ValidationReport {
    let (frame, pts) = project_ring(ring);
    let convex = is_convex_2d(&pts);
    let self_intersecting = self_intersects_2d(Execution::Sequential, &pts);
    let mut violations = Vec::new();
    if constraints.require_convex && !convex {
        violations.push(Violation { code: ViolationCode::NonConvex, message: "section turns both ways".into() });
    }
    let needs_simple = constraints.inner_circle_radius.is_some();
    if self_intersecting && (constraints.forbid_self_intersection || needs_simple) {
        violations.push(Violation { code: ViolationCode::SelfIntersect, message: "section edges cross".into() });
    }
    let mut contains_inner_circle = None;
    let mut center_in_bound = None;
    if !(self_intersecting && needs_simple) {
        match check_containment(ring, constraints) {
            Ok(c) => {
                contains_inner_circle = c.contains_inner_circle;
                center_in_bound = c.center_in_bound;
            }
            Err(e) => violations.push(Violation { code: ViolationCode::InnerCircleMiss, message: e.to_string() }),
        }
    } else if let Some(r) = constraints.center_bound_radius {
        center_in_bound = Some(center_offset(ring, &frame, constraints) <= r + TOL);
    }
    if contains_inner_circle == Some(false) {
        let r = constraints.inner_circle_radius.unwrap_or_default();
        violations.push(Violation {
            code: ViolationCode::InnerCircleMiss,
            message: format!("section does not contain the radius {r} circle around the origin"),
        });
    }
    if center_in_bound == Some(false) {
        let r = constraints.center_bound_radius.unwrap_or_default();
        let d = center_offset(ring, &frame, constraints);
        violations.push(Violation {
            code: ViolationCode::CenterOutOfBound,
            message: format!("section center is {d:.3} from the origin, limit {r}"),
        });
    }
    let passed = violations.is_empty();
    ValidationReport { convex, self_intersecting, contains_inner_circle, center_in_bound, violations, passed }
}

/// Validates independent sections, in parallel when enabled.
pub fn validate_sections(exec: Execution, rings: &[Ring], constraints: &SectionConstraints) -> Vec<ValidationReport> {
    exec::map_indices(exec, rings.len(), |i| validate_section(&rings[i], constraints))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_xz(pts: &[(f64, f64)]) -> Ring {
        Ring::new(pts.iter().map(|&(x, z)| Point3::new(x, 0.0, z)).collect()).unwrap()
    }

    fn ngon(n: usize, r: f64, c: (f64, f64)) -> Ring {
        ring_xz(
            &(0..n)
                .map(|k| {
                    let t = TAU * k as f64 / n as f64;
                    (c.0 + r * t.cos(), c.1 + r * t.sin())
                })
                .collect::<Vec<_>>(),
        )
    }

    fn square() -> Ring {
        ring_xz(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    fn bowtie() -> Ring {
        ring_xz(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)])
    }

    #[test]
    fn convexity() {
        assert!(is_convex(&square()));
        assert!(!is_convex(&ring_xz(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.0, 2.0), (1.0, 1.0), (0.0, 1.0)])));
        assert!(is_convex(&ring_xz(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])));
    }

    #[test]
    fn self_intersection() {
        assert!(!self_intersects(&square()));
        assert!(self_intersects(&bowtie()));
        assert!(!self_intersects(&ring_xz(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])));
        // spike folding back along its incoming edge
        assert!(self_intersects(&ring_xz(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 1.0)])));
        // vertex touching a non-adjacent edge
        assert!(self_intersects(&ring_xz(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.0, 0.0), (0.0, 2.0)])));
    }

    #[test]
    fn containment_examples() {
        let c = SectionConstraints::column();
        assert_eq!(
            check_containment(&ngon(64, 6.5, (0.0, 0.0)), &c).unwrap(),
            Containment { contains_inner_circle: Some(true), center_in_bound: Some(true) }
        );
        assert_eq!(check_containment(&ngon(64, 5.0, (0.0, 0.0)), &c).unwrap().contains_inner_circle, Some(false));
        assert_eq!(check_containment(&ngon(64, 6.0, (0.0, 0.0)), &c).unwrap().contains_inner_circle, Some(true));
        assert!(matches!(check_containment(&bowtie(), &c), Err(GeomError::InvalidRing(_))));
    }

    #[test]
    fn report_codes() {
        let convex_only = SectionConstraints { require_convex: true, ..Default::default() };
        assert!(validate_section(&square(), &convex_only).passed);

        let r = validate_section(&bowtie(), &SectionConstraints::default());
        assert_eq!(r.codes(), vec![ViolationCode::SelfIntersect]);
        assert!(!r.passed);

        let r = validate_section(&ngon(128, 7.0, (2.9, 0.0)), &SectionConstraints::column());
        assert_eq!(r.codes(), vec![ViolationCode::InnerCircleMiss]);

        let r = validate_section(&ngon(64, 6.5, (4.0, 0.0)), &SectionConstraints::column());
        assert!(r.codes().contains(&ViolationCode::CenterOutOfBound));

        let lifted = ngon(64, 6.5, (0.0, 0.0)).translated(Point3::new(0.0, 12.0, 0.0));
        assert!(validate_section(&lifted, &SectionConstraints::column()).passed);
    }

    #[test]
    fn codes_serialize_screaming() {
        assert_eq!(serde_json::to_string(&ViolationCode::CenterOutOfBound).unwrap(), "\"CENTER_OUT_OF_BOUND\"");
    }

    #[test]
    fn batch_matches_single() {
        let rings: Vec<Ring> = (3..80).map(|n| ngon(n, 6.5, (0.1, 0.0))).collect();
        let c = SectionConstraints::column();
        let seq = validate_sections(Execution::Sequential, &rings, &c);
        let par = validate_sections(Execution::Parallel, &rings, &c);
        assert_eq!(seq, par);
    }
}
