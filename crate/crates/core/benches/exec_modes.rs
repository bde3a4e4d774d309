use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jc_susy::darboux::{darboux_for_kind, SlopeRule};
use jc_susy::fock::{FockTruncation, GridAxis};
use jc_susy::hierarchy::resonant_sequence;
use jc_susy::intertwiners::IntertwinerKind;
use jc_susy::models::JCParams;
use jc_susy::verification::{property_suite, SuiteConfig};
use jc_susy::Exec;

const MODES: [Exec; 2] = [Exec::Sequential, Exec::Parallel];

fn darboux(c: &mut Criterion) {
    let p = JCParams::new(3.0, 1.25);
    let grid = GridAxis::default();
    let mut g = c.benchmark_group("darboux_l1");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| darboux_for_kind(IntertwinerKind::L1, black_box(&p), &grid, SlopeRule::Exact, 4.0, e).unwrap())
        });
    }
    g.finish();
}

fn resonant(c: &mut Criterion) {
    let t = FockTruncation::new(40).unwrap();
    let mut g = c.benchmark_group("resonant_chain_k9");
    g.sample_size(20);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| resonant_sequence(9, black_box(1.0), &t, e).unwrap())
        });
    }
    g.finish();
}

fn properties(c: &mut Criterion) {
    let cfg = SuiteConfig::default();
    let mut g = c.benchmark_group("property_draws_200");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| property_suite(black_box(&cfg), e))
        });
    }
    g.finish();
}

criterion_group!(benches, darboux, resonant, properties);
criterion_main!(benches);
