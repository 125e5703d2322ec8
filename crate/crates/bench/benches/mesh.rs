use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracscreen_bench::{snowflake, square};
use fracscreen_core::{generate_diameter_mesh, generate_level_mesh};

fn meshes(c: &mut Criterion) {
    let sq = square();
    let sf = snowflake();
    let mut g = c.benchmark_group("mesh");
    for level in [4, 6] {
        g.bench_with_input(BenchmarkId::new("square_level", level), &level, |b, &l| {
            b.iter(|| generate_level_mesh(&sq, black_box(l)).len())
        });
    }
    for h in [0.1, 0.03] {
        g.bench_with_input(BenchmarkId::new("snowflake_diameter", h), &h, |b, &h| {
            b.iter(|| generate_diameter_mesh(&sf, black_box(h)).unwrap().len())
        });
    }
    g.finish();
}

criterion_group!(benches, meshes);
criterion_main!(benches);
