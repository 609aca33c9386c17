//! Trajectory and sampling checks of the dissipation claims.
//!
//! Storage functions are never formed. Integral checks rely on starting at the
//! origin, where every storage is zero, so the running supply integral of a
//! dissipative system can never go negative.

mod gain;
mod oracle;
mod supply;

pub use gain::l2_gain_estimate;
pub use oracle::{exact_supply, proof_step_oracle, trace_oracle, ORACLE_TOL};
pub use supply::{
    check_dissipation, io_passivity_series, open_loop_ifofp_series, qsr_supply_series, subsystem_ifofp_series,
    Subsystem, SupplySeries, VerificationReport,
};
