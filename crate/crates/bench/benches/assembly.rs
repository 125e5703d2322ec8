use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracscreen_bench::{scattering, snowflake, square};
use fracscreen_core::bem::{assemble, solve};

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assembly");
    g.sample_size(10);
    for level in [3, 4] {
        let cfg = scattering(square(), level);
        g.bench_with_input(BenchmarkId::new("square_level", level), &cfg, |b, cfg| {
            b.iter(|| assemble(cfg).unwrap().len())
        });
    }
    let cfg = scattering(snowflake(), 2);
    g.bench_function("snowflake_level_2", |b| b.iter(|| assemble(&cfg).unwrap().len()));

    let sys = assemble(&scattering(square(), 4)).unwrap();
    g.bench_function("solve_square_level_4", |b| b.iter(|| solve(&sys).unwrap().residual));
    g.finish();
}

criterion_group!(benches, assembly);
criterion_main!(benches);
