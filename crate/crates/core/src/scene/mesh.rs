//! Scene geometry: each wall is its face outline (doors notched into the
//! bottom edge, windows as holes) extruded through the wall thickness; the
//! roof is the footprint extruded upward.

use super::{Roof, SceneModel, Wall};
use crate::geom::triangulate::triangulate;
use crate::geom::{GeomError, Mesh, Point3};

/// Extrudes a 2D region into a closed prism. `place(p, side)` lifts a 2D
/// point onto the front (`side = 1`) or back (`side = -1`) cap, which face
/// `front_normal` and its opposite; `lift_dir` maps 2D directions to 3D.
fn extrude(
    outer: &[[f64; 2]],
    holes: &[Vec<[f64; 2]>],
    place: impl Fn([f64; 2], f64) -> Point3,
    front_normal: Point3,
    lift_dir: impl Fn([f64; 2]) -> Point3,
) -> Result<Mesh, GeomError> {
    let mut flat: Vec<[f64; 2]> = outer.to_vec();
    let mut loops = vec![(0..outer.len()).collect::<Vec<_>>()];
    for h in holes {
        loops.push((flat.len()..flat.len() + h.len()).collect());
        flat.extend_from_slice(h);
    }
    let k = flat.len();
    let mut vertices: Vec<Point3> = flat.iter().map(|&p| place(p, 1.0)).collect();
    vertices.extend(flat.iter().map(|&p| place(p, -1.0)));
    let mut mesh = Mesh::new(vertices, Vec::new());
    let push_facing = |mesh: &mut Mesh, t: [usize; 3], want: Point3| {
        let [a, b, c] = t.map(|i| mesh.vertices[i]);
        let n = (b - a).cross(c - a);
        mesh.triangles.push(if n.dot(want) >= 0.0 { t } else { [t[0], t[2], t[1]] });
    };
    for t in triangulate(outer, holes)? {
        push_facing(&mut mesh, t, front_normal);
        push_facing(&mut mesh, t.map(|i| i + k), -front_normal);
    }
    for (li, ring) in loops.iter().enumerate() {
        // outward from the material: away from the interior for the outer
        // loop, into the hole for holes
        let n = ring.len();
        let pts: Vec<[f64; 2]> = ring.iter().map(|&i| flat[i]).collect();
        let area2: f64 = (0..n).map(|i| pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1]).sum();
        let material_left = (area2 > 0.0) == (li == 0);
        for i in 0..n {
            let (p, q) = (pts[i], pts[(i + 1) % n]);
            let d = [q[0] - p[0], q[1] - p[1]];
            let right = [d[1], -d[0]];
            let o = if material_left { right } else { [-right[0], -right[1]] };
            let want = lift_dir(o);
            let (fa, fb) = (ring[i], ring[(i + 1) % n]);
            let (ba, bb) = (fa + k, fb + k);
            push_facing(&mut mesh, [fa, ba, bb], want);
            push_facing(&mut mesh, [fa, bb, fb], want);
        }
    }
    Ok(mesh)
}

fn wall_mesh(scene: &SceneModel, wall: &Wall) -> Result<Mesh, GeomError> {
    let length = wall.length();
    let dir = Point3::new((wall.end.x - wall.start.x) / length, (wall.end.y - wall.start.y) / length, 0.0);
    let normal = Point3::new(-dir.y, dir.x, 0.0);
    let up = Point3::new(0.0, 0.0, 1.0);
    let mut doors: Vec<(f64, f64, f64)> = scene
        .doors
        .iter()
        .filter(|d| d.host_wall == wall.id)
        .map(|d| {
            let (a, b) = d.span(length);
            (a, b, d.height)
        })
        .collect();
    doors.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut outer = vec![[0.0, 0.0]];
    for (a, b, h) in doors {
        outer.extend([[a, 0.0], [a, h], [b, h], [b, 0.0]]);
    }
    outer.extend([[length, 0.0], [length, wall.height], [0.0, wall.height]]);
    let holes: Vec<Vec<[f64; 2]>> = scene
        .windows
        .iter()
        .filter(|w| w.host_wall == wall.id)
        .map(|w| {
            let (a, b) = w.span(length);
            vec![[a, w.sill_height], [b, w.sill_height], [b, w.top()], [a, w.top()]]
        })
        .collect();
    let half = wall.thickness / 2.0;
    extrude(
        &outer,
        &holes,
        |[s, h], side| wall.start + dir * s + normal * (side * half) + up * h,
        normal,
        |[s, h]| dir * s + up * h,
    )
}

fn roof_mesh(roof: &Roof) -> Result<Mesh, GeomError> {
    let outline: Vec<[f64; 2]> = roof.footprint.iter().map(|p| [p.x, p.y]).collect();
    let base = roof.footprint[0].z;
    let t = roof.thickness;
    extrude(
        &outline,
        &[],
        |[x, y], side| Point3::new(x, y, base + if side > 0.0 { t } else { 0.0 }),
        Point3::new(0.0, 0.0, 1.0),
        |[x, y]| Point3::new(x, y, 0.0),
    )
}

/// One closed mesh per wall (by id) and one for the roof.
pub fn scene_components(scene: &SceneModel) -> Result<Vec<(String, Mesh)>, GeomError> {
    let mut out = Vec::with_capacity(scene.walls.len() + 1);
    for wall in &scene.walls {
        out.push((wall.id.clone(), wall_mesh(scene, wall)?));
    }
    if let Some(roof) = &scene.roof {
        out.push(("roof".to_string(), roof_mesh(roof)?));
    }
    Ok(out)
}

/// All scene components merged into one mesh.
pub fn scene_to_mesh(scene: &SceneModel) -> Result<Mesh, GeomError> {
    let mut mesh = Mesh::default();
    for (_, part) in scene_components(scene)? {
        mesh.append(&part);
    }
    Ok(mesh)
}
