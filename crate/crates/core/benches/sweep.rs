use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use etpass_core::certificates::{Topology, TriggerLevel};
use etpass_core::dynamics::ModelRegistry;
use etpass_core::eventsim::{sweep, Scenario, SignalSpec, SweepTarget};
use etpass_core::par::Exec;

fn delta_sweep(c: &mut Criterion) {
    let reg = ModelRegistry::builtin();
    let mut scn = Scenario::new(
        Topology::PlantSide,
        "ex2_plant",
        "ex2_controller",
        Some(TriggerLevel::new(0.5).unwrap()),
        None,
    );
    scn.w1 = SignalSpec::Sinusoid { amplitude: 1.0, angular_freq: 2.5 * PI, phase: 0.0, offset: 0.0 };
    let deltas: Vec<TriggerLevel> = (1..=9).map(|k| TriggerLevel::new(k as f64 / 10.0).unwrap()).collect();

    let mut group = c.benchmark_group("delta_sweep_9x20s");
    group.sample_size(10);
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_function(name, |b| {
            b.iter(|| sweep(black_box(&scn), SweepTarget::All, &deltas, &reg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, delta_sweep);
criterion_main!(benches);
