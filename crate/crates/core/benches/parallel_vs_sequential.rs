//! Sequential and parallel execution of the two hot loops: exhaustive
//! completeness checks and sampled correctness runs.

use bridgelab_core::bridges::{check_bridge_correct_with, check_complete_with, CheckMode, DEFAULT_EXHAUSTIVE_BUDGET};
use bridgelab_core::registry::Registry;
use bridgelab_core::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn completeness(c: &mut Criterion) {
    let reg = Registry::default();
    let mut group = c.benchmark_group("exhaustive-completeness");
    group.sample_size(10);
    for id in ["modswitch", "halfkey-composed", "gentry:lwe-n1q4:trivial"] {
        let preset = if id == "halfkey-composed" { Some("lwe-n1q4") } else { None };
        let b = reg.bridge(id, preset).unwrap();
        for (label, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(label, id), &b, |bench, b| {
                bench
                    .iter(|| check_complete_with(b, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, 0, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn correctness(c: &mut Criterion) {
    let reg = Registry::default();
    let mut group = c.benchmark_group("correctness-10k");
    group.sample_size(10);
    for id in ["lwe-additive", "circuit:trivial:full-adder", "gentry-composed"] {
        let b = reg.bridge(id, None).unwrap();
        let trials = if id == "gentry-composed" { 500 } else { 10_000 };
        for (label, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(label, id), &b, |bench, b| {
                bench.iter(|| check_bridge_correct_with(b, trials, 0, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, completeness, correctness);
criterion_main!(benches);
