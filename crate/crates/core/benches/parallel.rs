use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ramification::exec::Execution;
use ramification::propgroup::{closed_subgroup_dimension, enumerate_group, shift_check, sl2_generators, Precision};
use ramification::sample::{rng_for, sen_profile};
use ramification::tower::BracketTower;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn closure(c: &mut Criterion) {
    let prec = Precision::new(2, 3, 4).unwrap();
    let gens = sl2_generators(prec).unwrap();
    let mut group = c.benchmark_group("sl2_closure_mod_81");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| closed_subgroup_dimension(black_box(&gens), prec, 30_000_000, exec).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let prec = Precision::new(2, 5, 2).unwrap();
    let mut group = c.benchmark_group("enumerate_gl2_mod_25");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| enumerate_group(black_box(prec), exec).unwrap())
        });
    }
    group.finish();
}

fn shift(c: &mut Criterion) {
    let mut group = c.benchmark_group("shift_check_gl2_mod_81");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| shift_check(2, 3, 1, 4, black_box(2000), 0, exec).unwrap())
        });
    }
    group.finish();
}

fn profile_sweep(c: &mut Criterion) {
    let indices: Vec<u64> = (0..64).collect();
    let mut group = c.benchmark_group("bracket_sweep_64_profiles");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec.map(&indices, |&k| {
                    let tower = BracketTower::new(sen_profile(&mut rng_for(1, k)));
                    (1..=8).map(|i| tower.different_direct(i).unwrap()).collect::<Vec<_>>()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, closure, enumeration, shift, profile_sweep);
criterion_main!(benches);
