use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use etpass_core::certificates::{Interconnection, PassivityIndices, TriggerLevel};
use etpass_core::par::Exec;
use etpass_core::verify::proof_step_oracle;

fn oracle(c: &mut Criterion) {
    let idx = |nu, rho| PassivityIndices::new(nu, rho).unwrap();
    let lvl = |d| TriggerLevel::new(d).unwrap();
    let ic = Interconnection::both_sides(idx(0.02, 0.8), idx(0.5, 1.0), lvl(0.02), lvl(0.7));
    let mut group = c.benchmark_group("proof_step_oracle");
    group.sample_size(10);
    for samples in [100_000usize, 1_000_000] {
        for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, samples), &samples, |b, &n| {
                b.iter(|| proof_step_oracle(black_box(&ic), n, 1, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, oracle);
criterion_main!(benches);
