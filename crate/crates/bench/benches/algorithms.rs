use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;
use num_rational::BigRational;

use kcover::frlp::{build_lp, dual_certificate, solve_lp};
use kcover::matching::max_matching;
use kcover::oracle::{min_cover_exact, OracleBudget};
use kcover::packing::{certify_no_improvement, improve_packing, ImprovementParams};
use kcover::prpsli::{solve, PipelineConfig};
use kcover::semilocal::{semilocal_cover, SemiLocalGate};
use kcover::Packing;
use kcover_bench::{example_unit, random3, random_graph, random_k, tight4};

fn matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_matching");
    for n in [50usize, 200, 800] {
        let g = random_graph(n, 8.0 / n as f64, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| max_matching(black_box(g))));
    }
    group.finish();
}

fn semilocal(c: &mut Criterion) {
    let mut group = c.benchmark_group("semilocal_cover");
    for n in [30usize, 120] {
        let inst = random3(n, 3).instance;
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| semilocal_cover(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

fn packing(c: &mut Criterion) {
    let unit = example_unit();
    let a_side = unit.intended_packing.clone().unwrap();
    let params = ImprovementParams { i: 4, s: 5, restricted: true };
    c.bench_function("certify_example_unit_s5", |b| {
        b.iter(|| {
            let mut gate = SemiLocalGate::new(&unit.instance);
            certify_no_improvement(&unit.instance, &a_side, params, Some(&mut gate), 100_000_000)
        })
    });
    let tight = tight4(2);
    let params = ImprovementParams { i: 4, s: 3, restricted: true };
    c.bench_function("restricted_improve_tight4_u2", |b| {
        b.iter(|| {
            let mut gate = SemiLocalGate::new(&tight.instance);
            improve_packing(&tight.instance, &Packing::empty(4), params, Some(&mut gate))
        })
    });
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("prpsli_solve");
    for k in [4usize, 6] {
        let inst = random_k(60, k, 5).instance;
        let cfg = PipelineConfig::new(k, BigRational::new(BigInt::from(1), BigInt::from(8)));
        group.bench_with_input(BenchmarkId::from_parameter(k), &inst, |b, inst| b.iter(|| solve(inst, &cfg).unwrap()));
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let inst = random_k(15, 4, 9).instance;
    c.bench_function("min_cover_exact_n15", |b| b.iter(|| min_cover_exact(&inst, &OracleBudget::default()).unwrap()));
}

fn lp(c: &mut Criterion) {
    let eps = BigRational::new(BigInt::from(1), BigInt::from(10_000_000));
    let mut group = c.benchmark_group("lp");
    for k in [6usize, 12] {
        let model = build_lp(k, &eps).unwrap();
        group.bench_with_input(BenchmarkId::new("solve", k), &model, |b, m| b.iter(|| solve_lp(m).unwrap()));
        group.bench_with_input(BenchmarkId::new("dual", k), &k, |b, &k| b.iter(|| dual_certificate(k, &eps).unwrap()));
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = matching, semilocal, packing, pipeline, oracle, lp
}
criterion_main!(benches);
