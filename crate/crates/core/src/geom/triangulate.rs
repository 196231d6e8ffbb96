//! Ear clipping for simple polygons with holes. Holes are joined to the
//! outer boundary by the shortest diagonal that stays inside, so no Steiner
//! points are added and a rectangle with one rectangular hole yields 8
//! triangles.

use super::predicates::{cross2, point_segment_distance, segments_touch, signed_area2, sub2, P2};
use super::GeomError;

const EPS: f64 = 1e-12;

fn orient(a: P2, b: P2, c: P2) -> f64 {
    cross2(sub2(b, a), sub2(c, a))
}

/// Is `q` strictly inside the wedge at `p` (neighbours `a`, `b`, interior on the left)?
fn in_wedge(a: P2, p: P2, b: P2, q: P2) -> bool {
    if orient(a, p, b) >= 0.0 {
        orient(a, p, q) > EPS && orient(p, b, q) > EPS
    } else {
        orient(a, p, q) > EPS || orient(p, b, q) > EPS
    }
}

fn same(a: P2, b: P2) -> bool {
    (a[0] - b[0]).abs() <= EPS && (a[1] - b[1]).abs() <= EPS
}

fn cycle_edges(cycle: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..cycle.len()).map(move |i| (cycle[i], cycle[(i + 1) % cycle.len()]))
}

fn diagonal_clear(pts: &[P2], rings: &[&[usize]], from: P2, to: P2) -> bool {
    rings.iter().all(|ring| {
        cycle_edges(ring).all(|(i, j)| {
            let (c, d) = (pts[i], pts[j]);
            if same(c, from) || same(c, to) || same(d, from) || same(d, to) {
                // edges sharing an endpoint only conflict if the other end lies on the diagonal
                let other = if same(c, from) || same(c, to) { d } else { c };
                return same(other, from) || same(other, to) || point_segment_distance(other, from, to) > EPS;
            }
            !segments_touch(from, to, c, d, EPS)
        })
    })
}

/// Splices each hole into the outer cycle through a bridge edge.
fn bridge_holes(pts: &[P2], mut outer: Vec<usize>, mut holes: Vec<Vec<usize>>) -> Result<Vec<usize>, GeomError> {
    // rightmost holes first keeps later bridges short
    holes.sort_by(|a, b| {
        let ax = a.iter().map(|&i| pts[i][0]).fold(f64::MIN, f64::max);
        let bx = b.iter().map(|&i| pts[i][0]).fold(f64::MIN, f64::max);
        bx.total_cmp(&ax)
    });
    for k in 0..holes.len() {
        let hole = holes[k].clone();
        let rest: Vec<&[usize]> = holes[k + 1..].iter().map(Vec::as_slice).collect();
        let mut best: Option<(f64, usize, usize)> = None;
        for (oi, &o) in outer.iter().enumerate() {
            let n = outer.len();
            let (oa, ob) = (pts[outer[(oi + n - 1) % n]], pts[outer[(oi + 1) % n]]);
            for (hi, &h) in hole.iter().enumerate() {
                let m = hole.len();
                let (ha, hb) = (pts[hole[(hi + m - 1) % m]], pts[hole[(hi + 1) % m]]);
                let d = sub2(pts[h], pts[o]);
                let len2 = d[0] * d[0] + d[1] * d[1];
                if best.is_some_and(|(b, _, _)| len2 >= b) {
                    continue;
                }
                if !in_wedge(oa, pts[o], ob, pts[h]) || !in_wedge(ha, pts[h], hb, pts[o]) {
                    continue;
                }
                let mut rings: Vec<&[usize]> = vec![&outer, &hole];
                rings.extend_from_slice(&rest);
                if diagonal_clear(pts, &rings, pts[o], pts[h]) {
                    best = Some((len2, oi, hi));
                }
            }
        }
        let (_, oi, hi) = best.ok_or_else(|| GeomError::Triangulation("no bridge reaches a hole".into()))?;
        let m = hole.len();
        let mut spliced = Vec::with_capacity(outer.len() + m + 2);
        spliced.extend_from_slice(&outer[..=oi]);
        spliced.extend((0..=m).map(|s| hole[(hi + s) % m]));
        spliced.push(outer[oi]);
        spliced.extend_from_slice(&outer[oi + 1..]);
        outer = spliced;
    }
    Ok(outer)
}

fn in_triangle(a: P2, b: P2, c: P2, p: P2) -> bool {
    orient(a, b, p) >= -EPS && orient(b, c, p) >= -EPS && orient(c, a, p) >= -EPS
}

fn clip_ears(pts: &[P2], mut cycle: Vec<usize>) -> Result<Vec<[usize; 3]>, GeomError> {
    let mut tris = Vec::with_capacity(cycle.len().saturating_sub(2));
    while cycle.len() > 3 {
        let n = cycle.len();
        let ear = (0..n).find(|&i| {
            let (ia, ib, ic) = (cycle[(i + n - 1) % n], cycle[i], cycle[(i + 1) % n]);
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            if orient(a, b, c) <= EPS {
                return false;
            }
            cycle.iter().all(|&j| {
                let p = pts[j];
                same(p, a) || same(p, b) || same(p, c) || !in_triangle(a, b, c, p)
            })
        });
        let i = ear.ok_or_else(|| GeomError::Triangulation(format!("no ear among {n} vertices")))?;
        tris.push([cycle[(i + n - 1) % n], cycle[i], cycle[(i + 1) % n]]);
        cycle.remove(i);
    }
    if cycle.len() == 3 {
        let [a, b, c] = [cycle[0], cycle[1], cycle[2]];
        if orient(pts[a], pts[b], pts[c]) <= EPS {
            return Err(GeomError::Triangulation("final triangle is degenerate".into()));
        }
        tris.push([a, b, c]);
    }
    Ok(tris)
}

/// Triangulates `outer` minus `holes`. Vertices are numbered outer first,
/// then each hole in order; triangles wind counterclockwise.
pub(crate) fn triangulate(outer: &[P2], holes: &[Vec<P2>]) -> Result<Vec<[usize; 3]>, GeomError> {
    if outer.len() < 3 {
        return Err(GeomError::Triangulation("outer boundary needs 3 vertices".into()));
    }
    let mut pts: Vec<P2> = outer.to_vec();
    let mut outer_idx: Vec<usize> = (0..outer.len()).collect();
    if signed_area2(outer) < 0.0 {
        outer_idx.reverse();
    }
    let mut hole_idx = Vec::with_capacity(holes.len());
    for hole in holes {
        let start = pts.len();
        pts.extend_from_slice(hole);
        let mut idx: Vec<usize> = (start..pts.len()).collect();
        if signed_area2(hole) > 0.0 {
            idx.reverse();
        }
        hole_idx.push(idx);
    }
    let cycle = bridge_holes(&pts, outer_idx, hole_idx)?;
    clip_ears(&pts, cycle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn area(pts: &[P2], tris: &[[usize; 3]]) -> f64 {
        tris.iter().map(|t| orient(pts[t[0]], pts[t[1]], pts[t[2]]) * 0.5).sum()
    }

    #[test]
    fn rectangle_with_window() {
        let outer = [[0.0, 0.0], [6.0, 0.0], [6.0, 3.0], [0.0, 3.0]];
        let hole = vec![[2.4, 0.9], [3.6, 0.9], [3.6, 2.1], [2.4, 2.1]];
        let tris = triangulate(&outer, std::slice::from_ref(&hole)).unwrap();
        assert_eq!(tris.len(), 8);
        let mut all = outer.to_vec();
        all.extend(hole);
        assert!((area(&all, &tris) - (18.0 - 1.44)).abs() < 1e-12);
        assert!(tris.iter().all(|t| orient(all[t[0]], all[t[1]], all[t[2]]) > 0.0));
    }

    #[test]
    fn notched_outline_with_two_holes() {
        let outer = [
            [0.0, 0.0], [1.0, 0.0], [1.0, 2.1], [2.0, 2.1], [2.0, 0.0],
            [6.0, 0.0], [6.0, 3.0], [0.0, 3.0],
        ];
        let holes = vec![
            vec![[3.0, 0.9], [4.0, 0.9], [4.0, 2.1], [3.0, 2.1]],
            vec![[4.5, 0.9], [5.5, 0.9], [5.5, 2.1], [4.5, 2.1]],
        ];
        let tris = triangulate(&outer, &holes).unwrap();
        let mut all = outer.to_vec();
        holes.iter().for_each(|h| all.extend_from_slice(h));
        assert_eq!(tris.len(), 16 + 2 * 2 - 2);
        assert!((area(&all, &tris) - (18.0 - 2.1 - 2.4)).abs() < 1e-12);
    }

    #[test]
    fn clockwise_input_is_normalized() {
        let outer = [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        let tris = triangulate(&outer, &[]).unwrap();
        assert_eq!(tris.len(), 2);
        assert!((area(&outer, &tris) - 1.0).abs() < 1e-15);
    }
}
