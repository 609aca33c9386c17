use serde::{Deserialize, Serialize};

use super::sim::{simulate, Scenario};
use super::stats::{comm_stats, DetectorStats, EventLog};
use super::trace::Trace;
use crate::certificates::{l2_stable, TriggerLevel};
use crate::dynamics::ModelRegistry;
use crate::par::{self, Exec};
use crate::{Error, Result};

/// Which trigger level a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Plant,
    Controller,
    /// Every detector the topology has.
    All,
}

/// One point of a trigger-level sweep. Counts are pooled over the varied
/// detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    /// `None` when the scenario carries no indices.
    pub l2_stable: Option<bool>,
    pub event_count: usize,
    pub event_ratio: f64,
    pub min_inter_event: Option<f64>,
    pub diverged: Option<f64>,
}

fn with_delta(scn: &Scenario, target: SweepTarget, delta: TriggerLevel) -> Scenario {
    let mut s = scn.clone();
    let (p, c) = match target {
        SweepTarget::Plant => (true, false),
        SweepTarget::Controller => (false, true),
        SweepTarget::All => (true, true),
    };
    if p && s.topology.detects_plant() {
        s.delta_p = Some(delta);
    }
    if c && s.topology.detects_controller() {
        s.delta_c = Some(delta);
    }
    s
}

/// Runs one simulation and reduces it to a sweep row.
pub fn sweep_point(
    scn: &Scenario,
    target: SweepTarget,
    delta: TriggerLevel,
    registry: &ModelRegistry,
) -> Result<SweepRow> {
    let applies = match target {
        SweepTarget::Plant => scn.topology.detects_plant(),
        SweepTarget::Controller => scn.topology.detects_controller(),
        SweepTarget::All => true,
    };
    if !applies {
        return Err(Error::config(format!("topology {} has no detector for sweep target {target:?}", scn.topology)));
    }
    let s = with_delta(scn, target, delta);
    let (trace, log) = simulate(&s, registry)?;
    Ok(summarize(&s, &trace, &log, target))
}

/// Reduces a finished run to a sweep row; `delta` is the largest level among
/// the varied detectors.
pub fn summarize(scn: &Scenario, trace: &Trace, log: &EventLog, target: SweepTarget) -> SweepRow {
    let stats = comm_stats(log, scn);
    let take_p = target != SweepTarget::Controller;
    let take_c = target != SweepTarget::Plant;
    let varied: Vec<DetectorStats> =
        [stats.plant.filter(|_| take_p), stats.controller.filter(|_| take_c)].into_iter().flatten().collect();
    let count: usize = varied.iter().map(|d| d.count).sum();
    let ratio = if varied.is_empty() { 0.0 } else { count as f64 / (varied.len() * scn.grid_points()) as f64 };
    let delta = [scn.delta_p.filter(|_| take_p), scn.delta_c.filter(|_| take_c)]
        .into_iter()
        .flatten()
        .map(TriggerLevel::value)
        .fold(0.0, f64::max);
    SweepRow {
        delta,
        l2_stable: scn.interconnection().ok().map(|ic| l2_stable(&ic.certificate()).q_negative_definite),
        event_count: count,
        event_ratio: ratio,
        min_inter_event: varied.iter().filter_map(|d| d.min_interval).reduce(f64::min),
        diverged: trace.diverged,
    }
}

/// Sweeps `deltas`; rows come back in input order for either `exec`.
pub fn sweep(
    scn: &Scenario,
    target: SweepTarget,
    deltas: &[TriggerLevel],
    registry: &ModelRegistry,
    exec: Exec,
) -> Result<Vec<SweepRow>> {
    par::map(exec, deltas.to_vec(), |d| sweep_point(scn, target, d, registry))
        .into_iter()
        .collect()
}
