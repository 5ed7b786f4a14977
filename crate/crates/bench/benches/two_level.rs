use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twolevel_bench::{two_grid_spaces, two_level_spaces};
use twolevel_core::assembly::{assemble_system, default_quadrature};
use twolevel_core::problems::example_one;
use twolevel_core::{two_grid_iterate, two_level_iterate, TwoGridConfig, TwoLevelConfig};

fn assembly(c: &mut Criterion) {
    let spec = example_one();
    let mut group = c.benchmark_group("assemble_system");
    for degree in [3, 4, 5, 6] {
        let (space, _) = two_level_spaces(9, degree, degree);
        let quad = default_quadrature(degree);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &space, |b, space| {
            b.iter(|| assemble_system(space, &spec, &quad).unwrap())
        });
    }
    group.finish();
}

fn iterations(c: &mut Criterion) {
    let spec = example_one();
    let mut group = c.benchmark_group("iteration");
    group.sample_size(10);
    for m in [3, 4] {
        let (coarse, fine) = two_level_spaces(m, 3, 6);
        let cfg = TwoLevelConfig::new(3, 6, 3);
        group.bench_with_input(BenchmarkId::new("two_level", m), &m, |b, _| {
            b.iter(|| two_level_iterate(&spec, &coarse, &fine, &cfg).unwrap())
        });
        let (coarse, fine) = two_grid_spaces(m, 3, m);
        let cfg = TwoGridConfig::new(3, m, 3);
        group.bench_with_input(BenchmarkId::new("two_grid", m), &m, |b, _| {
            b.iter(|| two_grid_iterate(&spec, &coarse, &fine, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, assembly, iterations);
criterion_main!(benches);
