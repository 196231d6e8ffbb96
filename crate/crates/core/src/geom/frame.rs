use super::Point3;

/// Orthonormal frame of a plane: `origin + a*u + b*v`, with `normal = u × v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFrame {
    pub origin: Point3,
    pub u: Point3,
    pub v: Point3,
    pub normal: Point3,
}

impl PlaneFrame {
    /// Fits a frame through the points: `u` runs from the first point to the
    /// farthest one, the normal comes from the point farthest off that line.
    /// Collinear input gets an arbitrary plane through the line; `None` when
    /// all points coincide.
    pub fn fit(points: &[Point3]) -> Option<PlaneFrame> {
        let a = *points.first()?;
        let b = points.iter().copied().max_by(|p, q| a.distance_sq(*p).total_cmp(&a.distance_sq(*q)))?;
        let u = (b - a).normalized()?;
        let off_line = points
            .iter()
            .map(|&p| u.cross(p - a))
            .max_by(|p, q| p.norm().total_cmp(&q.norm()))?;
        let normal = if off_line.norm() > 1e-12 * a.distance(b).max(1.0) {
            off_line.normalized()?
        } else {
            u.cross(least_aligned_axis(u)).normalized()?
        };
        Some(PlaneFrame { origin: a, u, v: normal.cross(u), normal })
    }

    /// Frame through `origin` with a deterministic in-plane basis: `u` is the
    /// coordinate axis least aligned with the normal, projected into the plane.
    pub fn canonical(origin: Point3, normal: Point3) -> Option<PlaneFrame> {
        let normal = normal.normalized()?;
        let e = least_aligned_axis(normal);
        let u = (e - normal * e.dot(normal)).normalized()?;
        Some(PlaneFrame { origin, u, v: normal.cross(u), normal })
    }

    pub fn project(&self, p: Point3) -> [f64; 2] {
        let d = p - self.origin;
        [d.dot(self.u), d.dot(self.v)]
    }

    pub fn lift(&self, [a, b]: [f64; 2]) -> Point3 {
        self.origin + self.u * a + self.v * b
    }

    /// Signed distance of `p` from the plane.
    pub fn height(&self, p: Point3) -> f64 {
        (p - self.origin).dot(self.normal)
    }

    /// Orthogonal projection of `p` onto the plane.
    pub fn foot(&self, p: Point3) -> Point3 {
        p - self.normal * self.height(p)
    }
}

fn least_aligned_axis(n: Point3) -> Point3 {
    let comps = [n.x.abs(), n.y.abs(), n.z.abs()];
    let mut best = 0;
    for i in 1..3 {
        if comps[i] < comps[best] {
            best = i;
        }
    }
    match best {
        0 => Point3::new(1.0, 0.0, 0.0),
        1 => Point3::new(0.0, 1.0, 0.0),
        _ => Point3::new(0.0, 0.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_xz_plane() {
        let pts = [Point3::new(0.0, 2.0, 0.0), Point3::new(3.0, 2.0, 0.0), Point3::new(1.0, 2.0, 4.0)];
        let f = PlaneFrame::fit(&pts).unwrap();
        assert!((f.normal.y.abs() - 1.0).abs() < 1e-12);
        for p in pts {
            assert!(f.height(p).abs() < 1e-12);
            let q = f.lift(f.project(p));
            assert!(q.distance(p) < 1e-12);
        }
    }

    #[test]
    fn canonical_frame_for_y_normal_uses_x() {
        let f = PlaneFrame::canonical(Point3::ORIGIN, Point3::new(0.0, -1.0, 0.0)).unwrap();
        assert_eq!(f.u, Point3::new(1.0, 0.0, 0.0));
        assert!((f.v.z.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_have_no_frame() {
        assert!(PlaneFrame::fit(&[Point3::ORIGIN; 3]).is_none());
        let line = [Point3::ORIGIN, Point3::new(1.0, 1.0, 0.0), Point3::new(2.0, 2.0, 0.0)];
        let f = PlaneFrame::fit(&line).unwrap();
        assert!(line.iter().all(|p| f.height(*p).abs() < 1e-12));
    }
}
