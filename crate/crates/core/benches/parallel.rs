//! Sequential vs rayon evaluation of the two data-parallel kernels: the tensor
//! quadrature sum and coefficientwise series inversion.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eulerring::divergence::{solve_product_form, DivergenceForm, LinearFactor, QuadratureOptions};
use eulerring::evaluable::Evaluable;
use eulerring::expr::parse;
use eulerring::index::indices_up_to;
use eulerring::series::lphi_inverse;
use eulerring::{exec, PonderationPoly, Scalar, SparsePoly, TruncatedSeries};
use num_complex::Complex64;

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", false), ("parallel", true)]
}

fn quadrature(c: &mut Criterion) {
    let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let g = parse("ln(x + y + z)", &names).unwrap();
    let f = |a: [i64; 3], r: i64| LinearFactor::new(a.iter().map(|v| Scalar::from_i64(*v)).collect(), Scalar::from_i64(r));
    let form = DivergenceForm::new(vec![f([1, 1, 1], 1), f([2, 1, 1], 1), f([1, 2, 1], 2)]).unwrap();
    let sol = solve_product_form(&form, &g, QuadratureOptions { nodes: 48, grading: 3, ..Default::default() }).unwrap();
    let x = [Complex64::new(1.0, 0.0); 3];
    let mut group = c.benchmark_group("quadrature_p3_m48");
    for (name, on) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_parallel(on);
            b.iter(|| sol.eval(&x).unwrap())
        });
    }
    group.finish();
}

fn series_inverse(c: &mut Criterion) {
    let n = 3;
    let trunc = 40;
    let phi = PonderationPoly::new(SparsePoly::from_terms(
        n,
        indices_up_to(n, 2).into_iter().map(|k| (k, Scalar::from_ratio(3, 2))),
    ));
    let g = TruncatedSeries::from_terms(
        n,
        trunc,
        indices_up_to(n, trunc).into_iter().map(|k| {
            let c = Scalar::from_ratio(1, 1 + k.total() as i64);
            (k, c)
        }),
    );
    let mut group = c.benchmark_group("lphi_inverse_n3_N40");
    for (name, on) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_parallel(on);
            b.iter(|| lphi_inverse(&phi, &g).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = quadrature, series_inverse
);
criterion_main!(benches);
