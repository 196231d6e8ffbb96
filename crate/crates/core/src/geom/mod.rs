//! Geometry kernel: coordinate parsing, closed-section interpolation,
//! validation predicates, lofting and mesh export.
//!
//! Units are meters. Incidence and plane tests use an absolute tolerance of
//! [`TOL`]; all boundaries are inclusive.

pub(crate) mod coords;
mod frame;
mod interp;
mod loft;
mod mesh;
mod point;
mod predicates;
pub(crate) mod triangulate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coords::{parse_coordinates, parse_points};
pub use frame::PlaneFrame;
pub use interp::{interpolate_closed_section, Degree};
pub use loft::{best_rotation, loft, loft_with, prepare_stack, twist_metric, PreparedStack};
pub use mesh::{export_obj, LoftedMesh, Mesh, MeshReport};
pub use point::Point3;
pub use predicates::{
    check_containment, is_convex, point_in_ring, self_intersects, self_intersects_with,
    validate_section, validate_sections, Containment, ValidationReport, Violation, ViolationCode,
};

/// Absolute tolerance for incidence, plane and containment tests.
pub const TOL: f64 = 1e-9;

/// Triangles below this area count as degenerate (m²).
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("syntax error at {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("expected {expected} points, found {found}")]
    CountMismatch { found: usize, expected: usize },
    #[error("point {index} leaves the section plane: coordinate {value}")]
    PlaneViolation { index: usize, value: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unsupported interpolation degree {0} (use 0 or 3)")]
    UnsupportedDegree(u32),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("loft needs at least 2 sections, got {0}")]
    TooFewSections(usize),
    #[error("section {index} does not advance along the stacking axis")]
    NonMonotoneStack { index: usize },
    #[error("section {index} encloses no area")]
    DegenerateSection { index: usize },
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn of(self, p: Point3) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
            Axis::Z => p.z,
        }
    }

    pub fn unit(self) -> Point3 {
        match self {
            Axis::X => Point3::new(1.0, 0.0, 0.0),
            Axis::Y => Point3::new(0.0, 1.0, 0.0),
            Axis::Z => Point3::new(0.0, 0.0, 1.0),
        }
    }

    pub fn with(self, mut p: Point3, value: f64) -> Point3 {
        match self {
            Axis::X => p.x = value,
            Axis::Y => p.y = value,
            Axis::Z => p.z = value,
        }
        p
    }
}

/// The axis-aligned plane a section lives in (`axis = value`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPlane {
    pub axis: Axis,
    pub value: f64,
}

impl SectionPlane {
    pub fn new(axis: Axis, value: f64) -> Self {
        Self { axis, value }
    }
}

/// A closed planar ring of at least three finite points. The closing edge
/// from the last point back to the first is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point3>", into = "Vec<Point3>")]
pub struct Ring(Vec<Point3>);

impl Ring {
    pub fn new(points: Vec<Point3>) -> Result<Self, GeomError> {
        if points.len() < 3 {
            return Err(GeomError::InvalidRing(format!("{} vertices, need at least 3", points.len())));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(GeomError::InvalidRing(format!("vertex {i} is not finite")));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[Point3] {
        &self.0
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.0
    }

    pub fn translated(&self, offset: Point3) -> Ring {
        Ring(self.0.iter().map(|&p| p + offset).collect())
    }

    pub fn map(&self, f: impl Fn(Point3) -> Point3) -> Ring {
        Ring(self.0.iter().map(|&p| f(p)).collect())
    }

    /// Mean of the vertices.
    pub fn centroid(&self) -> Point3 {
        Point3::mean(&self.0)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.0.len();
        (0..n).map(|i| self.0[i].distance(self.0[(i + 1) % n])).sum()
    }
}

impl std::ops::Deref for Ring {
    type Target = [Point3];
    fn deref(&self) -> &[Point3] {
        &self.0
    }
}

impl TryFrom<Vec<Point3>> for Ring {
    type Error = GeomError;
    fn try_from(points: Vec<Point3>) -> Result<Self, GeomError> {
        Ring::new(points)
    }
}

impl From<Ring> for Vec<Point3> {
    fn from(r: Ring) -> Self {
        r.0
    }
}

/// Control points of a closed curve plus the interpolation degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedSection {
    pub control_points: Vec<Point3>,
    pub degree: Degree,
    pub plane: SectionPlane,
}

impl ClosedSection {
    pub fn new(control_points: Vec<Point3>, degree: Degree, plane: SectionPlane) -> Result<Self, GeomError> {
        if control_points.len() < 3 {
            return Err(GeomError::DegenerateInput(format!(
                "{} control points, need at least 3",
                control_points.len()
            )));
        }
        for (index, p) in control_points.iter().enumerate() {
            let value = plane.axis.of(*p);
            if (value - plane.value).abs() > TOL {
                return Err(GeomError::PlaneViolation { index, value });
            }
        }
        let n = control_points.len();
        for i in 0..n {
            if control_points[i].distance(control_points[(i + 1) % n]) <= TOL {
                return Err(GeomError::DegenerateInput(format!("control points {i} and {} coincide", (i + 1) % n)));
            }
        }
        Ok(Self { control_points, degree, plane })
    }

    /// Samples the closed curve; degree 0 returns the control polygon.
    pub fn sample(&self, samples_per_span: usize) -> Result<Ring, GeomError> {
        interpolate_closed_section(&self.control_points, self.degree, samples_per_span)
    }

    /// The same section moved to `axis = value`.
    pub fn moved_to(&self, value: f64) -> ClosedSection {
        let axis = self.plane.axis;
        ClosedSection {
            control_points: self.control_points.iter().map(|&p| axis.with(p, value)).collect(),
            degree: self.degree,
            plane: SectionPlane::new(axis, value),
        }
    }
}

/// Constraint families a section must satisfy before lofting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionConstraints {
    pub require_convex: bool,
    pub forbid_self_intersection: bool,
    /// Radius of the circle the section must contain.
    pub inner_circle_radius: Option<f64>,
    /// Radius the vertex centroid must stay within.
    pub center_bound_radius: Option<f64>,
    pub center_bound_origin: Point3,
}

impl Default for SectionConstraints {
    fn default() -> Self {
        Self {
            require_convex: false,
            forbid_self_intersection: true,
            inner_circle_radius: None,
            center_bound_radius: None,
            center_bound_origin: Point3::ORIGIN,
        }
    }
}

impl SectionConstraints {
    /// Convex, non-intersecting, containing a radius-6 circle, centroid within
    /// radius 3 of the origin.
    pub fn column() -> Self {
        Self {
            require_convex: true,
            forbid_self_intersection: true,
            inner_circle_radius: Some(6.0),
            center_bound_radius: Some(3.0),
            center_bound_origin: Point3::ORIGIN,
        }
    }

    pub fn check(&self) -> Result<(), GeomError> {
        for (name, r) in [("inner_circle_radius", self.inner_circle_radius), ("center_bound_radius", self.center_bound_radius)] {
            if let Some(r) = r {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(GeomError::InvalidArgument(format!("{name} must be positive, got {r}")));
                }
            }
        }
        if let (Some(inner), Some(bound)) = (self.inner_circle_radius, self.center_bound_radius) {
            if inner <= bound {
                return Err(GeomError::InvalidArgument(format!(
                    "inner_circle_radius {inner} must exceed center_bound_radius {bound}"
                )));
            }
        }
        if !self.center_bound_origin.is_finite() {
            return Err(GeomError::InvalidArgument("center_bound_origin is not finite".into()));
        }
        Ok(())
    }
}
