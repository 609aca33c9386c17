use serde::{Deserialize, Serialize};

use crate::certificates::{dot, PassivityIndices, QsrCertificate};
use crate::eventsim::{OpenLoopTrace, Trace};
use crate::{Error, Result};

/// Instantaneous supply rate and its running trapezoidal integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplySeries {
    pub t: Vec<f64>,
    pub omega: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// Whether the source run started at the origin; the integral bound is
    /// only meaningful then.
    pub zero_initial_state: bool,
}

impl SupplySeries {
    pub fn from_omega(t: Vec<f64>, omega: Vec<f64>, zero_initial_state: bool) -> Self {
        assert_eq!(t.len(), omega.len(), "time and supply columns differ in length");
        let mut cumulative = Vec::with_capacity(omega.len());
        let mut acc = 0.0;
        for k in 0..omega.len() {
            if k > 0 {
                acc += 0.5 * (t[k] - t[k - 1]) * (omega[k] + omega[k - 1]);
            }
            cumulative.push(acc);
        }
        SupplySeries { t, omega, cumulative, zero_initial_state }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Outcome of one check; shared by integral checks and the sampling oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub passed: bool,
    /// Smallest running integral (for the oracle: the worst margin).
    pub min_cumulative: f64,
    pub first_violation_time: Option<f64>,
    pub tolerance: f64,
    pub samples: usize,
    pub worst_margin: Option<f64>,
    pub zero_initial_state: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl VerificationReport {
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// `passed` iff the running integral never drops below `-tol`.
pub fn check_dissipation(series: &SupplySeries, tol: f64) -> VerificationReport {
    let min = series.cumulative.iter().copied().fold(0.0, f64::min);
    let first = series
        .cumulative
        .iter()
        .position(|&c| c < -tol)
        .map(|k| series.t[k]);
    VerificationReport {
        name: "dissipation".to_string(),
        passed: first.is_none(),
        min_cumulative: min,
        first_violation_time: first,
        tolerance: tol,
        samples: series.len(),
        worst_margin: None,
        zero_initial_state: series.zero_initial_state,
        detail: None,
    }
}

/// `w'Rw + 2w'Sy + y'Qy` along a closed-loop trace.
pub fn qsr_supply_series(trace: &Trace, cert: &QsrCertificate) -> Result<SupplySeries> {
    if trace.topology != cert.topology {
        return Err(Error::TopologyMismatch { certificate: cert.topology, trace: trace.topology });
    }
    let omega = trace.samples().map(|s| cert.supply(s.w1, s.w2, s.y_p, s.y_c)).collect();
    Ok(SupplySeries::from_omega(trace.t.clone(), omega, trace.zero_initial_state))
}

/// `w1'y_p - eps0 w1'w1 - delta0 y_p'y_p`; requires `w2 = 0` throughout.
pub fn io_passivity_series(trace: &Trace, eps0: f64, delta0: f64) -> Result<SupplySeries> {
    if let Some(k) = trace.w2.iter().position(|&v| v != 0.0) {
        let t = trace.t[k / trace.width.max(1)];
        return Err(Error::Hypothesis(format!("w2 is nonzero at t = {t}; the w1 -> y_p result assumes w2 = 0")));
    }
    let omega = trace
        .samples()
        .map(|s| dot(s.w1, s.y_p) - eps0 * dot(s.w1, s.w1) - delta0 * dot(s.y_p, s.y_p))
        .collect();
    Ok(SupplySeries::from_omega(trace.t.clone(), omega, trace.zero_initial_state))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsystem {
    Plant,
    Controller,
}

fn ifofp(u: &[f64], y: &[f64], idx: PassivityIndices) -> f64 {
    dot(u, y) - idx.nu * dot(u, u) - idx.rho * dot(y, y)
}

/// IF-OFP supply `u'y - nu u'u - rho y'y` of one subsystem inside the loop.
pub fn subsystem_ifofp_series(trace: &Trace, which: Subsystem, idx: PassivityIndices) -> SupplySeries {
    let omega = trace
        .samples()
        .map(|s| match which {
            Subsystem::Plant => ifofp(s.u_p, s.y_p, idx),
            Subsystem::Controller => ifofp(s.u_c, s.y_c, idx),
        })
        .collect();
    // The subsystem's own start matters, but the trace only records the joint flag.
    SupplySeries::from_omega(trace.t.clone(), omega, trace.zero_initial_state)
}

/// IF-OFP supply along an open-loop run.
pub fn open_loop_ifofp_series(ol: &OpenLoopTrace, idx: PassivityIndices) -> Result<SupplySeries> {
    if ol.input_width != ol.output_width {
        return Err(Error::Dimension {
            context: format!("IF-OFP supply of `{}`", ol.system),
            expected: ol.input_width,
            actual: ol.output_width,
        });
    }
    let w = ol.input_width;
    let omega = (0..ol.t.len())
        .map(|k| ifofp(&ol.u[k * w..(k + 1) * w], &ol.y[k * w..(k + 1) * w], idx))
        .collect();
    Ok(SupplySeries::from_omega(ol.t.clone(), omega, ol.zero_initial_state))
}
