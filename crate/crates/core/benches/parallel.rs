use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use loftgen_core::expr::{parse_expression_unchecked, sample_profile_with};
use loftgen_core::geom::{best_rotation, loft_with, self_intersects_with, validate_sections, Point3, Ring, SectionConstraints};
use loftgen_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn wobbly_ring(n: usize, y: f64, phase: f64) -> Ring {
    Ring::new(
        (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                let r = 7.0 + 0.3 * (5.0 * t + phase).sin();
                Point3::new(r * t.cos(), y, r * t.sin())
            })
            .collect(),
    )
    .unwrap()
}

fn self_intersection(c: &mut Criterion) {
    let mut group = c.benchmark_group("self_intersects");
    for n in [256, 2048] {
        let ring = wobbly_ring(n, 0.0, 0.0);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &ring, |b, ring| b.iter(|| self_intersects_with(exec, black_box(ring))));
        }
    }
    group.finish();
}

fn section_validation(c: &mut Criterion) {
    let rings: Vec<Ring> = (0..32).map(|k| wobbly_ring(512, k as f64, k as f64 * 0.1)).collect();
    let constraints = SectionConstraints::column();
    let mut group = c.benchmark_group("validate_sections");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| validate_sections(exec, black_box(&rings), &constraints)));
    }
    group.finish();
}

fn rotation_search(c: &mut Criterion) {
    let prev = wobbly_ring(2048, 0.0, 0.0).into_points();
    let cur = wobbly_ring(2048, 1.0, 0.7).into_points();
    let mut group = c.benchmark_group("best_rotation");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| best_rotation(exec, black_box(&prev), black_box(&cur))));
    }
    group.finish();
}

fn lofting(c: &mut Criterion) {
    let rings: Vec<Ring> = (0..8).map(|k| wobbly_ring(400, k as f64 * 2.0, k as f64)).collect();
    let mut group = c.benchmark_group("loft");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| loft_with(exec, black_box(&rings), true).unwrap()));
    }
    group.finish();
}

fn profile_sampling(c: &mut Criterion) {
    let ast = parse_expression_unchecked("sin(x)*cos(y)*cos(z) + cos(x)*sin(y)*sin(z) + x^3 - 2xyz").unwrap();
    let mut group = c.benchmark_group("sample_profile");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| sample_profile_with(exec, black_box(&ast), (-5.0, 5.0), 100_000, 1.0, 1.0).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, self_intersection, section_validation, rotation_search, lofting, profile_sampling);
criterion_main!(benches);
