use criterion::{criterion_group, criterion_main, Criterion};
use parconn::{
    canonical_divisor, invert_app_bun, reconstruct, rr_space_basis, Divisor, ReconstructOptions,
    Sampler, Scenario,
};

fn bench_rr_basis(c: &mut Criterion) {
    let sc = Scenario::builtin("flagship-n1").unwrap();
    let curve = sc.curve().unwrap();
    let k_div = canonical_divisor(&curve);
    let d = sc.a_divisor().add(&k_div).add(&Divisor::point(sc.t[0].clone()));
    c.bench_function("rr_space_basis deg 6", |bench| {
        bench.iter(|| rr_space_basis(&curve, &d).unwrap())
    });
}

fn bench_reconstruct(c: &mut Criterion) {
    let sc = Scenario::builtin("flagship-n1").unwrap();
    let curve = sc.curve().unwrap();
    let mut sampler = Sampler::new(&sc).unwrap();
    let s = sampler.draw().unwrap();
    let mut group = c.benchmark_group("inversion");
    group.sample_size(10);
    group.bench_function("reconstruct flagship-n1", |bench| {
        bench.iter(|| {
            reconstruct(
                &curve,
                &s.gamma,
                &s.pb,
                &sc.nu,
                &sampler.line_connection,
                ReconstructOptions::default(),
            )
            .unwrap()
        })
    });
    group.bench_function("invert_app_bun flagship-n1", |bench| {
        bench.iter(|| {
            invert_app_bun(
                &curve,
                &s.gamma,
                &s.pb,
                &sc.nu,
                &sampler.line_connection,
                ReconstructOptions::default(),
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_rr_basis, bench_reconstruct);
criterion_main!(benches);
