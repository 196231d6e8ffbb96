//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use loftgen_core::expr::{extract_payload, parse_expression, PayloadKind, RawResponse, TrigPolicy};
use loftgen_core::genloop::{DesignSession, SessionConfig, SessionState};
use loftgen_core::geom::{
    export_obj, interpolate_closed_section, is_convex, loft, prepare_stack, self_intersects, validate_section, Degree,
    Point3, Ring, SectionConstraints, ViolationCode,
};
use loftgen_core::llm::{MockProvider, Role};
use loftgen_core::prompt::{Catalog, PromptSpec};
use loftgen_core::scene::{build_room, repair_loop, run_scene_script, scene_components, to_script, RepairState, RoomParams};
use loftgen_core::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg.into()) }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

type Oracle = fn(f64, f64, f64) -> f64;

fn golden_parse() -> Outcome {
    let start = Instant::now();
    let first = extract_payload(&RawResponse::new("{0;0} 0; x^3 + 2xyz + 5y^2z - 7z^3", 1).unwrap(), PayloadKind::Equation)
        .map_err(|e| e.to_string())?;
    // each oracle sums its terms one at a time
    let panels: [(&str, Oracle); 4] = [
        (&first, |x, y, z| {
            let terms = [x * x * x, 2.0 * x * y * z, 5.0 * y * y * z, -7.0 * z * z * z];
            terms.iter().sum()
        }),
        ("x^2y + 2xyz + z^3", |x, y, z| {
            let terms = [x * x * y, 2.0 * x * y * z, z * z * z];
            terms.iter().sum()
        }),
        ("x*y*z + 2*x*y + 3*x*z + 4*y*z + 5*x + 6*y + 7*z + 8", |x, y, z| {
            let terms = [x * y * z, 2.0 * x * y, 3.0 * x * z, 4.0 * y * z, 5.0 * x, 6.0 * y, 7.0 * z, 8.0];
            terms.iter().sum()
        }),
        ("sin(x)*cos(y)*cos(z) + cos(x)*sin(y)*sin(z)", |x, y, z| {
            let terms = [x.sin() * y.cos() * z.cos(), x.cos() * y.sin() * z.sin()];
            terms.iter().sum()
        }),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (text, oracle) in panels {
        let ast = parse_expression(text, TrigPolicy::default()).map_err(|e| format!("{text}: {e}"))?;
        for _ in 0..100 {
            let (x, y, z) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let (got, want) = (ast.eval(x, y, z), oracle(x, y, z));
            ensure(rel_close(got, want, 1e-12), format!("{text} at ({x}, {y}, {z}): {got} vs {want}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("4 panels, 400 evaluations within 1e-12".into())
}

fn extraction() -> Outcome {
    let raw = RawResponse::new("{0;0} 0; x^3 + 2xyz + 5y^2z - 7z^3", 1).unwrap();
    let got = extract_payload(&raw, PayloadKind::Equation).map_err(|e| e.to_string())?;
    ensure(got.as_bytes() == b"x^3 + 2xyz + 5y^2z - 7z^3", format!("got {got:?}"))?;
    Ok(format!("{got:?}"))
}

fn escalation_replay() -> Outcome {
    let start = Instant::now();
    let mock = MockProvider::load(fixture("escalation_mock.json")).map_err(|e| e.to_string())?;
    let config = SessionConfig { trigger_interval: 0.0, sections_target: 2, ..SessionConfig::equation_profile() };
    let mut session = DesignSession::new("c3", config, Catalog::builtin(), Arc::new(mock)).map_err(|e| e.to_string())?;
    session.start().map_err(|e| e.to_string())?;
    for _ in 0..4 {
        session.tick().map_err(|e| e.to_string())?;
    }
    ensure(session.accepted_sections().len() == 1, "final reply was not accepted")?;
    let catalog = Catalog::builtin();
    let added: Vec<Vec<String>> = session
        .records()
        .iter()
        .map(|r| r.added_clauses.iter().map(|id| catalog.get(id).unwrap().text.clone()).collect())
        .collect();
    let expected: Vec<Vec<String>> = vec![
        vec!["Do not number the equations".into(), "No text, only equations.".into()],
        vec!["Use the * operator whenever multiplication occurs.".into()],
        vec!["Only use sin and cos function not tan.".into()],
        vec![],
    ];
    ensure(added == expected, format!("additions {added:?}"))?;
    let prompt = session.prompt().render();
    let initial = PromptSpec::initial(PayloadKind::Equation).render();
    let tail: Vec<&str> = prompt.lines().skip(initial.lines().count()).collect();
    ensure(
        tail == ["Do not number the equations", "No text, only equations.", "Use the * operator whenever multiplication occurs.", "Only use sin and cos function not tan."],
        format!("prompt {prompt:?}"),
    )?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("3 additions in order, final prompt has 5 lines".into())
}

fn geometry_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut convex, mut crossing) = (0, 0);
    for i in 0..1000 {
        let ring = common::simple_ring(&mut rng);
        let want = common::hull_oracle_convex(&ring);
        ensure(is_convex(&ring) == want, format!("convexity disagrees on simple ring {i} ({} vertices)", ring.len()))?;
        convex += want as usize;
        let ring = common::any_ring(&mut rng);
        let want = common::segment_pair_oracle(&ring);
        ensure(self_intersects(&ring) == want, format!("self-intersection disagrees on ring {i} ({} vertices)", ring.len()))?;
        crossing += want as usize;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("1000 + 1000 rings agree ({convex} convex, {crossing} self-intersecting)"))
}

fn regular(n: usize, r: f64, center: Point3) -> Ring {
    Ring::new((0..n).map(|k| {
        let t = TAU * k as f64 / n as f64;
        Point3::new(center.x + r * t.cos(), center.y, center.z + r * t.sin())
    }).collect()).unwrap()
}

fn constraint_gate() -> Outcome {
    let c = SectionConstraints::column();
    let base = validate_section(&regular(64, 6.5, Point3::ORIGIN), &c);
    ensure(base.passed && base.convex && !base.self_intersecting, format!("base ring fails: {:?}", base.codes()))?;
    ensure(base.contains_inner_circle == Some(true) && base.center_in_bound == Some(true), "base ring misses a containment check")?;
    let moved = validate_section(&regular(64, 6.5, Point3::new(4.0, 0.0, 0.0)), &c);
    // the shifted ring also leaves the origin circle, since it spans x in [-2.5, 10.5]
    ensure(!moved.passed && moved.codes().contains(&ViolationCode::CenterOutOfBound), format!("translated: {:?}", moved.codes()))?;
    let small = validate_section(&regular(64, 5.0, Point3::ORIGIN), &c);
    ensure(small.codes() == [ViolationCode::InnerCircleMiss], format!("shrunk: {:?}", small.codes()))?;
    Ok(format!("pass / {:?} / {:?}", moved.codes(), small.codes()))
}

fn loft_integrity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let constraints = SectionConstraints { require_convex: true, ..SectionConstraints::default() };
    let mut triangles = 0;
    for stack in 0..50 {
        let count = rng.random_range(2..=6);
        let mut y = 0.0;
        let rings: Vec<Ring> = (0..count)
            .map(|_| {
                y += rng.random_range(0.5..3.0);
                common::convex_section(&mut rng, y)
            })
            .collect();
        for ring in &rings {
            ensure(validate_section(ring, &constraints).passed, format!("stack {stack}: generated section fails validation"))?;
        }
        let mesh = loft(&rings, true).map_err(|e| format!("stack {stack}: {e}"))?;
        let report = mesh.check();
        ensure(report.edge_manifold(), format!("stack {stack}: not edge-manifold"))?;
        ensure(report.euler_characteristic == 2, format!("stack {stack}: V - E + F = {}", report.euler_characteristic))?;
        triangles += report.triangle_count;
        let prepared = prepare_stack(Execution::Sequential, &rings).map_err(|e| e.to_string())?;
        for k in 1..count {
            let m = prepared.ring_size();
            let brute = (0..m).map(|r| common::brute_twist(&prepared.aligned[k - 1], &prepared.oriented[k], r)).fold(f64::INFINITY, f64::min);
            let chosen = common::brute_twist(&prepared.aligned[k - 1], &prepared.aligned[k], 0);
            ensure(chosen <= brute * (1.0 + 1e-12) + 1e-12, format!("stack {stack} ring {k}: twist {chosen} above minimum {brute}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("50 stacks, {triangles} triangles, all closed with minimal twist"))
}

struct SessionRun {
    records: String,
    transcript: Vec<(Role, String, u64)>,
    obj: String,
    ticks: usize,
    escalations: usize,
    watertight: bool,
}

fn run_fixture_session() -> Result<SessionRun, String> {
    let mock = MockProvider::load(fixture("session_mock.json")).map_err(|e| e.to_string())?;
    let config = SessionConfig { trigger_interval: 0.0, sections_target: 3, ..SessionConfig::coordinate_sections() };
    let mut session = DesignSession::new("c7", config, Catalog::builtin(), Arc::new(mock)).map_err(|e| e.to_string())?;
    let state = session.run_to_completion(&Default::default(), |_, _| {}).map_err(|e| e.to_string())?;
    ensure(state == SessionState::Complete, format!("state {}", state.name()))?;
    let mesh = session.assemble_model().map_err(|e| e.to_string())?;
    Ok(SessionRun {
        records: serde_json::to_string(session.records()).unwrap(),
        transcript: session.transcript().contents().into_iter().map(|(r, t, i)| (r, t.to_owned(), i)).collect(),
        obj: export_obj(&mesh).map_err(|e| e.to_string())?,
        ticks: session.records().len(),
        escalations: session.records().iter().filter(|r| !r.added_clauses.is_empty()).count(),
        watertight: mesh.check().watertight(),
    })
}

fn end_to_end_session() -> Outcome {
    let start = Instant::now();
    let first = run_fixture_session()?;
    let second = run_fixture_session()?;
    ensure(first.ticks == 4, format!("{} ticks", first.ticks))?;
    ensure(first.escalations == 1, format!("{} escalations", first.escalations))?;
    ensure(first.watertight, "model is not watertight")?;
    ensure(first.records == second.records, "reports differ between runs")?;
    ensure(first.transcript == second.transcript, "transcripts differ between runs")?;
    ensure(first.obj.as_bytes() == second.obj.as_bytes(), "OBJ bytes differ between runs")?;
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("session.obj");
    std::fs::write(&out, &first.obj).map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("4 ticks, 1 escalation, watertight, reproducible ({} OBJ bytes)", first.obj.len()))
}

fn repair_replay() -> Outcome {
    let start = Instant::now();
    let mock = MockProvider::load(fixture("repair_mock.json")).map_err(|e| e.to_string())?;
    let session = repair_loop("c8", "Build a one-room house with two windows, a door and a roof.", Arc::new(mock), 5)
        .map_err(|e| e.to_string())?;
    ensure(session.state() == RepairState::Converged, format!("{:?}", session.state()))?;
    ensure(session.attempts().len() == 2, format!("{} attempts", session.attempts().len()))?;
    let error = "line 3: UNDEFINED_REFERENCE: wall w5";
    let fed_back = session.transcript().messages().iter().any(|m| m.role == Role::User && m.content == error);
    ensure(fed_back, "error string missing from user turns")?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("converged in 2 attempts, fed back {error:?}"))
}

fn room_builder() -> Outcome {
    let scene = build_room(&RoomParams::new(6.0, 4.0, 3.0, 0.2, 1.0, 1.2, 0.9, 2.1, 0.0)).map_err(|e| e.to_string())?;
    ensure(scene.walls.len() == 4 && scene.windows.len() == 4 && scene.doors.len() == 1, "wrong element counts")?;
    let area = scene.roof.as_ref().map(|r| r.area()).unwrap_or_default();
    ensure(area == 24.0, format!("roof area {area}"))?;
    let again = run_scene_script(&to_script(&scene)).map_err(|e| e.to_string())?;
    ensure(again == scene, "round-trip changed the scene")?;
    let parts = scene_components(&scene).map_err(|e| e.to_string())?;
    for (name, mesh) in &parts {
        ensure(mesh.check().edge_manifold(), format!("{name} is not edge-manifold"))?;
    }
    Ok(format!("4 walls, 4 windows, 1 door, roof 24 m², {} manifold components", parts.len()))
}

fn corner_turns(pts: &[Point3]) -> Vec<f64> {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i] - pts[(i + n - 1) % n], pts[(i + 1) % n] - pts[i]);
            (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos()
        })
        .collect()
}

fn degree_contrast() -> Outcome {
    let radii = [5.0, 6.5, 4.0, 7.0, 5.5, 6.0, 3.5, 6.8, 4.5, 6.2];
    let control: Vec<Point3> = radii
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let t = TAU * k as f64 / 10.0;
            Point3::new(r * t.cos(), 0.0, r * t.sin())
        })
        .collect();
    let linear = interpolate_closed_section(&control, Degree::Linear, 16).map_err(|e| e.to_string())?;
    ensure(linear.len() == 10, format!("degree 0 gave {} vertices", linear.len()))?;
    let (want, got) = (corner_turns(&control), corner_turns(&linear));
    ensure(want.iter().zip(&got).all(|(a, b)| (a - b).abs() <= 1e-12), "degree 0 changed a corner angle")?;
    let cubic = interpolate_closed_section(&control, Degree::Cubic, 16).map_err(|e| e.to_string())?;
    let miss = control
        .iter()
        .map(|&c| (0..cubic.len()).map(|i| common::segment_distance(c, c, cubic[i], cubic[(i + 1) % cubic.len()])).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    ensure(miss <= 1e-6, format!("control point {miss} from curve"))?;
    let sharpest_poly = want.iter().cloned().fold(0.0, f64::max);
    let sharpest_curve = corner_turns(&cubic).into_iter().fold(0.0, f64::max);
    ensure(sharpest_curve <= sharpest_poly, format!("curve turns {sharpest_curve} rad at a vertex, polyline {sharpest_poly}"))?;
    Ok(format!("10 linear vertices; cubic max turn {sharpest_curve:.3} rad < {sharpest_poly:.3} rad"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden expression parse", golden_parse),
        ("payload extraction", extraction),
        ("escalation replay", escalation_replay),
        ("convexity and self-intersection oracles", geometry_oracles),
        ("column constraint gate", constraint_gate),
        ("loft integrity", loft_integrity),
        ("end-to-end session", end_to_end_session),
        ("repair loop replay", repair_replay),
        ("room builder", room_builder),
        ("degree 0 vs degree 3", degree_contrast),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
