#![allow(dead_code)]

use std::f64::consts::PI;

use etpass_core::certificates::{Interconnection, PassivityIndices, Topology, TriggerLevel};
use etpass_core::eventsim::{Scenario, SignalSpec};

pub fn idx(nu: f64, rho: f64) -> PassivityIndices {
    PassivityIndices::new(nu, rho).unwrap()
}

pub fn lvl(v: f64) -> TriggerLevel {
    TriggerLevel::new(v).unwrap()
}

pub fn sine(offset: f64) -> SignalSpec {
    SignalSpec::Sinusoid { amplitude: 1.0, angular_freq: 2.5 * PI, phase: 0.0, offset }
}

pub fn unit_step() -> SignalSpec {
    SignalSpec::Step { time: 1.0, level: 1.0 }
}

fn scenario(
    topology: Topology,
    models: (&str, &str),
    indices: (PassivityIndices, PassivityIndices),
    deltas: (Option<f64>, Option<f64>),
    w1: SignalSpec,
) -> Scenario {
    let mut s = Scenario::new(topology, models.0, models.1, deltas.0.map(lvl), deltas.1.map(lvl));
    s.p_indices = Some(indices.0);
    s.c_indices = Some(indices.1);
    s.w1 = w1;
    s
}

/// Plant-side loop, sinusoidal reference, no noise.
pub fn ex2_deterministic(delta: f64) -> Scenario {
    scenario(
        Topology::PlantSide,
        ("ex2_plant", "ex2_controller"),
        (idx(0.0, 1.0), idx(0.3, 0.5)),
        (Some(delta), None),
        sine(0.0),
    )
}

pub fn ex3() -> Scenario {
    ex2_deterministic(0.3)
}

pub fn ex6() -> Scenario {
    scenario(
        Topology::ControllerSide,
        ("ex4_plant", "ex4_controller"),
        (idx(0.0, -0.2), idx(1.0, 0.3)),
        (None, Some(0.2)),
        unit_step(),
    )
}

/// Both-sides loop with `nu_c = 0`.
pub fn ex9() -> Scenario {
    scenario(
        Topology::BothSides,
        ("ex7_plant", "ex7_controller"),
        (idx(0.0, 0.9), idx(0.0, 1.0)),
        (Some(0.55), Some(0.55)),
        sine(3.0),
    )
}

pub fn ex1() -> Interconnection {
    Interconnection::plant_side(idx(0.0, 0.4), idx(0.0, 1.8), lvl(0.3))
}

pub fn ex2() -> Interconnection {
    Interconnection::plant_side(idx(0.0, 1.0), idx(0.3, 0.5), lvl(0.5))
}

pub fn ex4() -> Interconnection {
    Interconnection::controller_side(idx(0.0, -0.2), idx(1.0, 0.3), lvl(0.2))
}

pub fn ex5() -> Interconnection {
    Interconnection::controller_side(idx(-0.37, 2.0), idx(0.5, 1.0), lvl(0.1))
}

pub fn ex7() -> Interconnection {
    Interconnection::both_sides(idx(0.0, 0.9), idx(0.0, 1.0), lvl(0.6), lvl(0.7))
}

pub fn ex8() -> Interconnection {
    Interconnection::both_sides(idx(0.02, 0.8), idx(0.5, 1.0), lvl(0.02), lvl(0.7))
}
