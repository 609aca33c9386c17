use serde::{Deserialize, Serialize};

use super::sim::Scenario;
use super::trace::Trace;

/// Event times per detector; `None` for a side without one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub plant: Option<Vec<f64>>,
    pub controller: Option<Vec<f64>>,
}

impl EventLog {
    pub fn from_trace(trace: &Trace) -> Self {
        let times = |events: &[bool]| -> Vec<f64> {
            trace.t.iter().zip(events).filter(|(_, &e)| e).map(|(&t, _)| t).collect()
        };
        EventLog {
            plant: trace.has_detector_p.then(|| times(&trace.event_p)),
            controller: trace.has_detector_c.then(|| times(&trace.event_c)),
        }
    }

    pub fn intervals(times: &[f64]) -> Vec<f64> {
        times.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorStats {
    pub count: usize,
    /// Events per second.
    pub rate: f64,
    pub min_interval: Option<f64>,
    pub mean_interval: Option<f64>,
    pub max_interval: Option<f64>,
    /// Events per grid point.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommSummary {
    pub plant: Option<DetectorStats>,
    pub controller: Option<DetectorStats>,
}

fn detector_stats(times: &[f64], duration: f64, grid_points: usize) -> DetectorStats {
    let iv = EventLog::intervals(times);
    let (min, max, mean) = if iv.is_empty() {
        (None, None, None)
    } else {
        (
            Some(iv.iter().copied().fold(f64::INFINITY, f64::min)),
            Some(iv.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            Some(iv.iter().sum::<f64>() / iv.len() as f64),
        )
    };
    DetectorStats {
        count: times.len(),
        rate: times.len() as f64 / duration,
        min_interval: min,
        mean_interval: mean,
        max_interval: max,
        ratio: times.len() as f64 / grid_points as f64,
    }
}

/// Communication load of each detector over the scenario's grid.
pub fn comm_stats(log: &EventLog, scn: &Scenario) -> CommSummary {
    let g = scn.grid_points();
    CommSummary {
        plant: log.plant.as_deref().map(|t| detector_stats(t, scn.duration, g)),
        controller: log.controller.as_deref().map(|t| detector_stats(t, scn.duration, g)),
    }
}
