//! Certification and co-simulation of event-triggered networked interconnections
//! of two IF-OFP systems.
//!
//! The crate is split along the lines of the workflow:
//!
//! * [`dynamics`] holds the state-space models, a fixed-step RK4 integrator and
//!   the registry of named example plants/controllers.
//! * [`certificates`] evaluates the closed-form QSR-dissipativity, L2-stability
//!   and passivity-index results for the three detector placements.
//! * [`eventsim`] simulates the closed loop with event detectors and zero-order
//!   holds and records a full trace.
//! * [`verify`] checks the certificates against traces and against randomly
//!   sampled points of the proofs' inequality chains.
//!
//! Batch workloads (the proof-step oracle and trigger-level sweeps) run on rayon
//! when the `parallel` feature is enabled, and sequentially otherwise; see [`par`].

pub mod certificates;
pub mod dynamics;
mod error;
pub mod eventsim;
pub mod par;
pub mod verify;

pub use error::{Error, Result};
