use criterion::{black_box, criterion_group, criterion_main, Criterion};
use g2ambient_bench::{dense_jet, einstein_seed, two_plane_function};
use g2ambient_core::ambient::fg_expand;
use g2ambient_core::g2::check_two_plane;
use g2ambient_core::geometries::{einstein_ambient, einstein_tractor};
use g2ambient_core::parallel_ext::extend_parallel;
use g2ambient_core::JetSpace;

fn jet_arithmetic(c: &mut Criterion) {
    let sp = JetSpace::get(5, 8);
    let a = dense_jet(&sp, 1);
    let b = dense_jet(&sp, 2).add_scalar(&g2ambient_core::q(3, 1));
    c.bench_function("jet_mul_5vars_order8", |bench| bench.iter(|| black_box(&a) * black_box(&b)));
    c.bench_function("jet_invert_5vars_order8", |bench| bench.iter(|| black_box(&b).invert().unwrap()));
}

fn pipelines(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipelines");
    g.sample_size(10);
    let seed = einstein_seed(5, 6);
    g.bench_function("fg_expand_n5_rho2", |bench| bench.iter(|| fg_expand(black_box(&seed), 2).unwrap()));
    let seed4 = einstein_seed(4, 8);
    let (amb, lambda) = einstein_ambient(&seed4, 1).unwrap();
    let chi = einstein_tractor(&seed4, &lambda).unwrap();
    g.bench_function("extend_parallel_n4_einstein", |bench| bench.iter(|| extend_parallel(black_box(&chi), &amb).unwrap()));
    let f = two_plane_function();
    g.bench_function("check_two_plane", |bench| bench.iter(|| check_two_plane(black_box(&f), 0.0).unwrap()));
    g.finish();
}

criterion_group!(benches, jet_arithmetic, pipelines);
criterion_main!(benches);
