use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gtheta_core::period::theta_basis;
use gtheta_core::theta::{theta_table, DEFAULT_MAX_TERMS};
use gtheta_core::*;

fn forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("induced form");
    for n in [4usize, 8, 10] {
        let l = gauss_zn(n).unwrap();
        let t = reduce(&l).unwrap();
        let q = enumerate_invariant_forms(&t).unwrap().remove(0);
        let induced = induce(&t, &q).unwrap().qq;
        group.bench_with_input(BenchmarkId::new("gauss_sum", n), &induced, |b, f| {
            b.iter(|| gauss_sum(black_box(f), 20).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("brown", n), &induced, |b, f| b.iter(|| brown(black_box(f)).unwrap()));
    }
    group.finish();
}

fn censuses(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    let cases = [gamma_2g(4).unwrap(), gauss_e8().unwrap(), gamma_2g(8).unwrap(), gauss_zn(10).unwrap()];
    for l in &cases {
        group.bench_function(l.label(), |b| b.iter(|| census(black_box(l), &CensusConfig::default()).unwrap()));
    }
    group.finish();
}

fn thetas(c: &mut Criterion) {
    let mut group = c.benchmark_group("theta table");
    group.sample_size(10);
    for l in [gamma_2g(2).unwrap(), gamma_2g(4).unwrap(), gauss_zn(4).unwrap()] {
        let tau = period_matrix(&l, &theta_basis(&l).unwrap()).unwrap();
        group.bench_function(l.label(), |b| b.iter(|| theta_table(black_box(&tau), 1e-10, DEFAULT_MAX_TERMS).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, forms, censuses, thetas);
criterion_main!(benches);
