//! Closed-loop simulation with event detectors and zero-order holds.

mod detector;
mod signal;
mod sim;
mod stats;
mod sweep;
mod trace;

pub use detector::{detector_check, EventDetectorState};
pub use signal::{sample_signal, SignalSpec};
pub use sim::{open_loop, simulate, OpenLoopTrace, Scenario};
pub use stats::{comm_stats, CommSummary, DetectorStats, EventLog};
pub use sweep::{summarize, sweep, sweep_point, SweepRow, SweepTarget};
pub use trace::{Row, Sample, Trace, CSV_COLUMNS};
