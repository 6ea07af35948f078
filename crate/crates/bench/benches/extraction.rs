use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ghzx_core::rng::stream;
use ghzx_core::*;

fn maximal_extraction(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximal_extraction");
    group.sample_size(10);
    for n in [101usize, 301, 1001] {
        let resource = make_linear_cluster(&LinearClusterSpec::line(n).unwrap());
        let plan = maximal_pattern(n, false).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            let mut rng = stream(1, 0);
            b.iter(|| {
                let ex = extract(&resource, &plan, Outcomes::Random(&mut rng)).unwrap();
                black_box(synthesize_corrections(&ex.post_state, &plan.vg).unwrap())
            })
        });
    }
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force_feasibility");
    group.sample_size(10);
    for n in [6usize, 8] {
        let spec = LinearClusterSpec::line(n).unwrap();
        let vg: Vec<usize> = (1..=n).step_by(2).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(brute_force_feasibility(&spec, &vg).unwrap()))
        });
    }
    group.finish();
}

fn planning(c: &mut Criterion) {
    c.bench_function("enumerate_feasible n=16 m=8", |b| {
        b.iter(|| black_box(enumerate_feasible(16, 8, false).unwrap().len()))
    });
}

criterion_group!(benches, maximal_extraction, brute_force, planning);
criterion_main!(benches);
