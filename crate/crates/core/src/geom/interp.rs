use serde::{Deserialize, Serialize};

use super::{GeomError, PlaneFrame, Point3, Ring, TOL};

/// Interpolation degree of a closed section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Degree {
    /// The control polygon itself.
    Linear,
    /// Uniform closed Catmull-Rom through every control point.
    #[default]
    Cubic,
}

impl TryFrom<u32> for Degree {
    type Error = GeomError;
    fn try_from(d: u32) -> Result<Self, GeomError> {
        match d {
            0 => Ok(Degree::Linear),
            3 => Ok(Degree::Cubic),
            other => Err(GeomError::UnsupportedDegree(other)),
        }
    }
}

impl From<Degree> for u32 {
    fn from(d: Degree) -> u32 {
        match d {
            Degree::Linear => 0,
            Degree::Cubic => 3,
        }
    }
}

impl std::fmt::Display for Degree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", u32::from(*self))
    }
}

fn catmull_rom(p0: Point3, p1: Point3, p2: Point3, p3: Point3, t: f64) -> Point3 {
    let t2 = t * t;
    let t3 = t2 * t;
    (p1 * 2.0 + (p2 - p0) * t + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * t2 + (-p0 + p1 * 3.0 - p2 * 3.0 + p3) * t3)
        * 0.5
}

/// Samples a closed curve through `control`. Cubic output has
/// `control.len() * samples_per_span` points, starting at `control[0]`.
pub fn interpolate_closed_section(control: &[Point3], degree: Degree, samples_per_span: usize) -> Result<Ring, GeomError> {
    if control.len() < 3 {
        return Err(GeomError::DegenerateInput(format!("{} control points, need at least 3", control.len())));
    }
    if samples_per_span == 0 {
        return Err(GeomError::InvalidArgument("samples_per_span must be at least 1".into()));
    }
    if control.iter().any(|p| !p.is_finite()) {
        return Err(GeomError::DegenerateInput("non-finite control point".into()));
    }
    let frame = PlaneFrame::fit(control).ok_or_else(|| GeomError::DegenerateInput("all control points coincide".into()))?;
    let scale = control.iter().map(|p| p.distance(frame.origin)).fold(0.0, f64::max);
    if let Some((i, h)) = control.iter().map(|&p| frame.height(p)).enumerate().find(|(_, h)| h.abs() > TOL) {
        return Err(GeomError::DegenerateInput(format!("control point {i} is {h} off the section plane")));
    }
    let off_line = control
        .iter()
        .map(|&p| frame.project(p)[1].abs())
        .fold(0.0, f64::max);
    if off_line <= TOL.max(1e-12 * scale) {
        return Err(GeomError::DegenerateInput("control points are collinear".into()));
    }
    match degree {
        Degree::Linear => Ring::new(control.to_vec()),
        Degree::Cubic => {
            let n = control.len();
            let mut out = Vec::with_capacity(n * samples_per_span);
            for i in 0..n {
                let p0 = control[(i + n - 1) % n];
                let p1 = control[i];
                let p2 = control[(i + 1) % n];
                let p3 = control[(i + 2) % n];
                for k in 0..samples_per_span {
                    out.push(catmull_rom(p0, p1, p2, p3, k as f64 / samples_per_span as f64));
                }
            }
            Ring::new(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point3> {
        vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 2.0),
            Point3::new(0.0, 0.0, 2.0),
        ]
    }

    #[test]
    fn linear_returns_control_polygon() {
        let ring = interpolate_closed_section(&square(), Degree::Linear, 8).unwrap();
        assert_eq!(ring.points(), square().as_slice());
    }

    #[test]
    fn cubic_passes_through_controls() {
        let ring = interpolate_closed_section(&square(), Degree::Cubic, 5).unwrap();
        assert_eq!(ring.len(), 20);
        for (i, c) in square().iter().enumerate() {
            assert!(ring[i * 5].distance(*c) < 1e-12);
        }
        assert!(ring.iter().all(|p| p.y.abs() < 1e-12));
    }

    #[test]
    fn cubic_midpoint_matches_formula() {
        // t = 1/2 on the span 0 -> 1 of the square: (9(P1+P2) - (P0+P3)) / 16
        let c = square();
        let ring = interpolate_closed_section(&c, Degree::Cubic, 2).unwrap();
        let expected = ((c[0] + c[1]) * 9.0 - (c[3] + c[2])) * (1.0 / 16.0);
        assert!(ring[1].distance(expected) < 1e-12);
    }

    #[test]
    fn degree_validation() {
        assert_eq!(Degree::try_from(2), Err(GeomError::UnsupportedDegree(2)));
        assert_eq!(Degree::try_from(3), Ok(Degree::Cubic));
        assert!(serde_json::from_str::<Degree>("1").is_err());
        assert_eq!(serde_json::to_string(&Degree::Linear).unwrap(), "0");
    }

    #[test]
    fn rejects_degenerate_input() {
        let line: Vec<_> = (0..4).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        assert!(matches!(interpolate_closed_section(&line, Degree::Cubic, 4), Err(GeomError::DegenerateInput(_))));
        let mut skew = square();
        skew[2].y = 0.5;
        assert!(matches!(interpolate_closed_section(&skew, Degree::Cubic, 4), Err(GeomError::DegenerateInput(_))));
        assert!(matches!(interpolate_closed_section(&square(), Degree::Cubic, 0), Err(GeomError::InvalidArgument(_))));
    }
}
