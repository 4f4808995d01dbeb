use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use locon_bench::{datum, local_pair, quadratic_char};
use locon_core::epsilon::epsilon_sum;
use locon_core::finite_field::gauss_sum;
use locon_core::group_core::transfer;
use locon_core::heisenberg::{build_rho, det_table};

fn gauss(c: &mut Criterion) {
    let mut group = c.benchmark_group("gauss_sum");
    for (p, s) in [(101u64, 1u32), (3, 5), (997, 1)] {
        let chi = quadratic_char(p, s);
        let one = chi.field().one();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{p}^{s}")), &chi, |b, chi| {
            b.iter(|| gauss_sum(black_box(chi), one))
        });
    }
    group.finish();
}

fn epsilon(c: &mut Criterion) {
    let mut group = c.benchmark_group("epsilon_sum");
    for (p, a) in [(2u64, 4u32), (3, 3), (5, 3), (7, 2)] {
        let (chi, psi) = local_pair(p, a);
        group.bench_function(format!("p={p},a={a}"), |b| b.iter(|| epsilon_sum(black_box(&chi), &psi, None).unwrap()));
    }
    group.finish();
}

fn heisenberg(c: &mut Criterion) {
    let mut group = c.benchmark_group("heisenberg");
    for name in ["D8", "Q8"] {
        let d = datum(name);
        group.bench_function(format!("build_rho/{name}"), |b| b.iter(|| build_rho(black_box(&d)).unwrap()));
        group.bench_function(format!("det_table/{name}"), |b| b.iter(|| det_table(black_box(&d)).unwrap()));
    }
    let d = datum("D8");
    let g = d.group();
    let h = g.derived_subgroup();
    group.bench_function("transfer/D8", |b| {
        b.iter(|| g.elements().map(|x| transfer(g, &h, x).unwrap()).sum::<usize>())
    });
    group.finish();
}

criterion_group!(benches, gauss, epsilon, heisenberg);
criterion_main!(benches);
