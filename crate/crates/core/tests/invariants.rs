mod common;

use std::f64::consts::PI;

use common::*;
use etpass_core::certificates::Topology;
use etpass_core::dynamics::ModelRegistry;
use etpass_core::eventsim::{simulate, EventLog, SignalSpec};
use etpass_core::verify::{check_dissipation, io_passivity_series, qsr_supply_series, trace_oracle};
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn simulated_samples_respect_the_pointwise_bound() {
    let reg = ModelRegistry::builtin();
    let mut scenarios = vec![ex2_deterministic(0.5), ex3(), ex6(), ex9()];
    let mut ex2_noisy = ex2_deterministic(0.5);
    ex2_noisy.w2 = SignalSpec::WhiteNoise { power: 1e-4, hold_dt: 1e-3, seed: 17 };
    scenarios.push(ex2_noisy);
    for scn in scenarios {
        let (tr, _) = simulate(&scn, &reg).unwrap();
        let r = trace_oracle(&tr, &scn.interconnection().unwrap()).unwrap();
        assert!(r.passed, "{}: worst margin {:?}", scn.plant, r.worst_margin);
    }
}

#[test]
fn halving_dt_does_not_flip_passing_checks() {
    let reg = ModelRegistry::builtin();
    let tol = 1e-6;
    for (scn, delta0) in [(ex3(), 0.3), (ex6(), 0.0), (ex9(), 0.10)] {
        let mut fine = scn.clone();
        fine.dt /= 2.0;
        let a = check_dissipation(&io_passivity_series(&simulate(&scn, &reg).unwrap().0, 0.0, delta0).unwrap(), tol);
        let b = check_dissipation(&io_passivity_series(&simulate(&fine, &reg).unwrap().0, 0.0, delta0).unwrap(), tol);
        assert!(a.passed && b.passed);
        assert!((a.min_cumulative - b.min_cumulative).abs() < 10.0 * tol);
    }
}

#[test]
fn qsr_integral_with_noise_stays_nonnegative() {
    let reg = ModelRegistry::builtin();
    let mut scn = ex2_deterministic(0.5);
    scn.w2 = SignalSpec::WhiteNoise { power: 1e-4, hold_dt: 1e-3, seed: 5 };
    let (tr, _) = simulate(&scn, &reg).unwrap();
    let rep = check_dissipation(&qsr_supply_series(&tr, &scn.interconnection().unwrap().certificate()).unwrap(), 1e-6);
    assert!(rep.passed, "{rep:?}");
}

#[test]
fn sinusoid_matches_closed_form_on_grid() {
    let reg = ModelRegistry::builtin();
    let (tr, _) = simulate(&ex2_deterministic(0.5), &reg).unwrap();
    for (k, (&t, &w)) in tr.t.iter().zip(&tr.w1).enumerate() {
        assert_eq!(t, k as f64 * 1e-3);
        assert!((w - (2.5 * PI * t).sin()).abs() <= 4.0 * f64::EPSILON);
    }
}

#[test]
fn both_detectors_fire_under_step_reference() {
    let reg = ModelRegistry::builtin();
    let mut scn = ex9();
    scn.w1 = unit_step();
    scn.delta_p = Some(lvl(0.6));
    scn.delta_c = Some(lvl(0.7));
    let (tr, log) = simulate(&scn, &reg).unwrap();
    assert_eq!(tr.topology, Topology::BothSides);
    let (p, c) = (log.plant.unwrap(), log.controller.unwrap());
    assert!(p.len() > 1 && c.len() > 1);
    assert!(p.len() < tr.len() && c.len() < tr.len());
    assert!(tr.y_p.iter().chain(&tr.y_c).all(|v| v.abs() < 100.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn events_are_sparse_sound_and_deterministic(delta in 0.05f64..=1.0, amp in 0.1f64..3.0, top in 0usize..3) {
        let reg = ModelRegistry::builtin();
        let mut scn = match top {
            0 => ex2_deterministic(delta),
            1 => { let mut s = ex6(); s.delta_c = Some(lvl(delta)); s }
            _ => { let mut s = ex9(); s.delta_p = Some(lvl(delta)); s.delta_c = Some(lvl(delta)); s }
        };
        scn.w1 = SignalSpec::Sinusoid { amplitude: amp, angular_freq: 2.0, phase: 0.3, offset: 0.0 };
        scn.duration = 3.0;
        let (tr, log) = simulate(&scn, &reg).unwrap();
        let (tr2, _) = simulate(&scn, &reg).unwrap();
        prop_assert_eq!(&tr, &tr2);
        for k in 0..tr.len() {
            let s = tr.sample(k);
            prop_assert!(dot(s.e_p, s.e_p) <= delta * dot(s.y_p, s.y_p));
            prop_assert!(dot(s.e_c, s.e_c) <= delta * dot(s.y_c, s.y_c));
        }
        for times in [log.plant, log.controller].into_iter().flatten() {
            prop_assert_eq!(times[0], 0.0);
            prop_assert!(EventLog::intervals(&times).iter().all(|&iv| iv >= scn.dt * (1.0 - 1e-9)));
        }
    }
}
