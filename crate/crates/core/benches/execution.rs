//! Sequential against data-parallel execution on the three parallel hot spots.

use std::hint::black_box;

use advlab::binpack::{gen_coprime_construction, random_order_score_with, MonteCarloOptions};
use advlab::cluster::{gen_theorem_instance, price_of_hierarchy, PohMethod, PohOptions};
use advlab::gasoline::{gen_extension, iterative_rounding_with, IrOptions};
use advlab::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn monte_carlo(c: &mut Criterion) {
    let inst = gen_coprime_construction(6).unwrap();
    let mut g = c.benchmark_group("monte_carlo_trials");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            let opts = MonteCarloOptions { exec, ..MonteCarloOptions::default() };
            b.iter(|| random_order_score_with(black_box(&inst), 20_000, 1, opts).unwrap())
        });
    }
    g.finish();
}

fn rounding_candidates(c: &mut Criterion) {
    let inst = gen_extension(3, 2).unwrap();
    let mut g = c.benchmark_group("rounding_candidate_lps");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            let opts = IrOptions { exec, exhaustive: true, ..IrOptions::default() };
            b.iter(|| iterative_rounding_with(black_box(&inst), opts).unwrap())
        });
    }
    g.finish();
}

fn hierarchy_splits(c: &mut Criterion) {
    let inst = gen_theorem_instance(5).unwrap();
    let mut g = c.benchmark_group("hierarchy_top_level_splits");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            let opts = PohOptions { method: PohMethod::Exhaustive, exec, max_points: 7 };
            b.iter(|| price_of_hierarchy(black_box(&inst), opts).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, monte_carlo, rounding_candidates, hierarchy_splits);
criterion_main!(benches);
