use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ffdioph_core::contfrac::{cf_expand, cf_expand_rational, digit_degrees};
use ffdioph_core::orbit::{solutions_hybrid, OrbitSpec, DEFAULT_BUDGET};
use ffdioph_core::testfn::TestFunction;
use ffdioph_core::{Field, Poly, SeriesSource};
use std::hint::black_box;

fn expansion(c: &mut Criterion) {
    let mut group = c.benchmark_group("cf_expand");
    for q in [2u32, 3, 16] {
        let field = Field::with_order(q).unwrap();
        let mut source = SeriesSource::random(&field, 1, 0);
        source.ensure(2048).unwrap();
        group.bench_with_input(BenchmarkId::new("random_2048", q), &source, |b, s| {
            b.iter(|| cf_expand(&mut s.clone(), usize::MAX))
        });
        group.bench_with_input(BenchmarkId::new("degrees_2048", q), &source, |b, s| {
            b.iter(|| digit_degrees(&mut s.clone(), usize::MAX))
        });
    }
    let field = Field::with_order(2).unwrap();
    let p = Poly::from_index(&field, (1 << 40) + 12345);
    let q = Poly::from_index(&field, (1 << 41) + 777);
    group.bench_function("rational_deg41", |b| b.iter(|| cf_expand_rational(black_box(&p), black_box(&q))));
    group.finish();
}

fn solutions(c: &mut Criterion) {
    let field = Field::with_order(2).unwrap();
    let spec = OrbitSpec::full(&field);
    let phi = TestFunction::preset("divlog", 2).unwrap();
    c.bench_function("solutions_hybrid_divlog_dmax200", |b| {
        b.iter(|| {
            let mut s = SeriesSource::random(&field, 7, 0);
            solutions_hybrid(&mut s, &spec, &phi, 200, DEFAULT_BUDGET).unwrap()
        })
    });
}

criterion_group!(benches, expansion, solutions);
criterion_main!(benches);
