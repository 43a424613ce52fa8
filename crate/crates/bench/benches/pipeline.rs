use criterion::{criterion_group, criterion_main, Criterion};
use ghz_core::fullmodel::{validate_reduction, FullModelParams, ValidateOptions};
use ghz_core::synthesis::profile_for;
use ghz_core::*;
use std::hint::black_box;

fn row1(n: usize) -> (EndpointSolution, PulseSchedule) {
    let ep = solve_endpoints(Signs::new(1, -1, 1).unwrap(), &SolveOptions::default()).unwrap();
    let p = profile_for(&ep, ProfileKind::Trapezoid, 1.0 / 3.0, 1.0).unwrap();
    let s = rabi_schedule(&build_curve(&ep, &p).unwrap(), n).unwrap();
    (ep, s)
}

fn exp_maps(c: &mut Criterion) {
    let g = build_generators();
    let pair = RotationVectorPair::new(Vec3::new(0.3, -1.2, 2.0), Vec3::new(-2.2, 0.4, 0.9));
    c.bench_function("exp_map closed form", |b| {
        b.iter(|| exp_map(black_box(&pair), &g))
    });
    c.bench_function("exp_map eigendecomposition", |b| {
        b.iter(|| ghz_core::unitary::exp_map_reference(black_box(&pair), &g))
    });
}

fn endpoints(c: &mut Criterion) {
    let opts = SolveOptions::default();
    c.bench_function("enumerate endpoints", |b| {
        b.iter(|| enumerate_endpoints(black_box(&opts)))
    });
}

fn propagation(c: &mut Criterion) {
    let (_, s) = row1(2001);
    let psi = w_state();
    c.bench_function("propagate 4096 steps", |b| {
        b.iter(|| propagate(black_box(&s), &psi, 4096))
    });
}

fn full_model(c: &mut Criterion) {
    let (ep, s) = row1(201);
    let params = FullModelParams::for_factor(s, 3.0).unwrap();
    let opts = ValidateOptions {
        force: true,
        ..Default::default()
    };
    let mut group = c.benchmark_group("full model");
    group.sample_size(10);
    group.bench_function("validate factor 3", |b| {
        b.iter(|| validate_reduction(black_box(&params), &ep, &opts))
    });
    group.finish();
}

criterion_group!(benches, exp_maps, endpoints, propagation, full_model);
criterion_main!(benches);
