use serde::{Deserialize, Serialize};

use crate::certificates::{dot, TriggerLevel};

/// Trigger rule: transmit when `|e|^2 > delta |y|^2`. Equality does not transmit.
pub fn detector_check(e: &[f64], y: &[f64], delta: TriggerLevel) -> bool {
    dot(e, e) > delta.value() * dot(y, y)
}

/// A detector monitoring one output and the value last sent over the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDetectorState {
    pub delta: TriggerLevel,
    pub held_output: Vec<f64>,
    pub last_event_time: f64,
    pub event_count: usize,
}

impl EventDetectorState {
    /// Initial transmission at `t`, seeding the hold.
    pub fn start(delta: TriggerLevel, y: &[f64], t: f64) -> Self {
        EventDetectorState { delta, held_output: y.to_vec(), last_event_time: t, event_count: 1 }
    }

    /// Checks the rule against the current output; on a trigger the hold is
    /// refreshed. Returns whether an event fired.
    pub fn observe(&mut self, y: &[f64], t: f64) -> bool {
        let e: Vec<f64> = y.iter().zip(&self.held_output).map(|(a, b)| a - b).collect();
        if detector_check(&e, y, self.delta) {
            self.held_output.copy_from_slice(y);
            self.last_event_time = t;
            self.event_count += 1;
            true
        } else {
            false
        }
    }
}
