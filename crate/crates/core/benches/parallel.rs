use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use limvote::harness::{run_sweep, BallotSize, SweepConfig};
use limvote::par::Execution;
use limvote::profile::SetProfile;
use limvote::rules::{optimal_committees_in, Objective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn sweep(c: &mut Criterion) {
    let cfg = SweepConfig {
        n: 300,
        phi: vec![0.0, 0.25, 1.0],
        g: vec![2, 6],
        k: vec![8],
        l: vec![BallotSize::Relative("1".into()), BallotSize::Relative("k/2".into())],
        trials: 8,
        ..SweepConfig::desk()
    };
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| run_sweep(&cfg, exec).unwrap()));
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = 18;
    let lists: Vec<Vec<usize>> = (0..40).map(|_| (0..m).filter(|_| rng.random_bool(0.3)).collect()).collect();
    let profile = SetProfile::from_lists(m, lists).unwrap();
    let mut group = c.benchmark_group("pav_search");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "m18_k6"), &profile, |b, p| {
            b.iter(|| optimal_committees_in(p, 6, Objective::Pav, u128::MAX, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, enumeration);
criterion_main!(benches);
