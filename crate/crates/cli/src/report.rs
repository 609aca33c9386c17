use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use etpass_core::certificates::{
    IndexBounds, Interconnection, PassivityReport, QsrCertificate, StabilityReport, TriggerLimits,
};
use etpass_core::eventsim::{CommSummary, SweepRow};
use etpass_core::verify::VerificationReport;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSection {
    pub interconnection: Interconnection,
    pub certificate: QsrCertificate,
    pub stability: StabilityReport,
    pub interconnection_bounds: IndexBounds,
    pub w1_yp_passivity: PassivityReport,
    pub w1_yp_bounds: IndexBounds,
    pub trigger_limits: TriggerLimits,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSection {
    pub rows: usize,
    pub grid_points: usize,
    pub diverged: Option<f64>,
    pub comm: CommSummary,
    pub summary: SweepRow,
    pub l2_gain: Option<f64>,
    pub trace_csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub certificate: Option<CertificateSection>,
    pub simulation: Option<SimulationSection>,
    pub verification: Vec<VerificationReport>,
    pub sweep: Option<Vec<SweepRow>>,
    pub warnings: Vec<String>,
    pub success: bool,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn bounds_line(out: &mut String, label: &str, b: &IndexBounds) {
    let rel = if b.delta_inclusive { "<=" } else { "<" };
    let _ = writeln!(
        out,
        "  {label}: eps0 <= {} (evaluated at {}), delta0 {rel} {}, feasible {}{}",
        b.eps_sup,
        b.eps0,
        b.delta_sup,
        b.feasible,
        if b.degenerate { " (degenerate)" } else { "" }
    );
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "etpass {}: {}", self.command, if self.success { "OK" } else { "FAILED" });
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        if let Some(c) = &self.certificate {
            let q = &c.certificate;
            let _ = writeln!(out, "\ncertificate ({})", q.topology);
            let _ = writeln!(out, "  Q = diag({}, {})  R = diag({}, {})", q.q_p, q.q_c, q.r_p, q.r_c);
            let _ = writeln!(out, "  S = [[{}, {}], [{}, {}]]", q.s11, q.s12, q.s21, q.s22);
            for cond in &c.stability.conditions {
                let _ = writeln!(
                    out,
                    "  {:<22} = {:<22} {} {}",
                    cond.name,
                    cond.value,
                    cond.relation.symbol(),
                    if cond.satisfied { "ok" } else { "violated" }
                );
            }
            let _ = writeln!(out, "  L2-stable: {}", c.stability.q_negative_definite);
            bounds_line(&mut out, "w -> y indices", &c.interconnection_bounds);
            let _ = writeln!(out, "  w1 -> y_p passive (w2 = 0): {}", c.w1_yp_passivity.passive);
            for cond in &c.w1_yp_passivity.conditions {
                let _ = writeln!(
                    out,
                    "    {:<20} = {:<22} {} {}",
                    cond.name,
                    cond.value,
                    cond.relation.symbol(),
                    if cond.satisfied { "ok" } else { "violated" }
                );
            }
            bounds_line(&mut out, "w1 -> y_p indices", &c.w1_yp_bounds);
            let _ = writeln!(
                out,
                "  largest trigger levels: delta_p {}, delta_c {}, feasible {}",
                opt(c.trigger_limits.delta_p_max),
                opt(c.trigger_limits.delta_c_max),
                c.trigger_limits.feasible
            );
        }
        if let Some(s) = &self.simulation {
            let _ = writeln!(out, "\nsimulation: {} of {} grid points -> {}", s.rows, s.grid_points, s.trace_csv);
            if let Some(t) = s.diverged {
                let _ = writeln!(out, "  DIVERGED at t = {t}");
            }
            for (side, st) in [("plant", s.comm.plant), ("controller", s.comm.controller)] {
                if let Some(st) = st {
                    let _ = writeln!(
                        out,
                        "  {side} detector: {} events, {:.4} of grid points, {:.3}/s, interval min {} mean {} max {}",
                        st.count,
                        st.ratio,
                        st.rate,
                        opt(st.min_interval),
                        opt(st.mean_interval),
                        opt(st.max_interval)
                    );
                }
            }
            if let Some(g) = s.l2_gain {
                let _ = writeln!(out, "  empirical L2 gain: {g}");
            }
        }
        if !self.verification.is_empty() {
            let _ = writeln!(out, "\nchecks");
            for v in &self.verification {
                let _ = writeln!(
                    out,
                    "  {:<16} {}  min {:e}  tol {:e}  samples {}{}{}",
                    v.name,
                    if v.passed { "PASS" } else { "FAIL" },
                    v.min_cumulative,
                    v.tolerance,
                    v.samples,
                    v.first_violation_time.map(|t| format!("  first violation t = {t}")).unwrap_or_default(),
                    if v.zero_initial_state { "" } else { "  (nonzero initial state)" },
                );
            }
        }
        if let Some(rows) = &self.sweep {
            let _ = writeln!(out, "\nsweep");
            let _ = writeln!(out, "{}", sweep_csv(rows).trim_end().replace(',', "\t"));
        }
        out
    }
}

pub const SWEEP_HEADER: &str = "delta,l2_stable,event_count,event_ratio,min_inter_event,diverged";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let stable = match r.l2_stable {
            Some(true) => "1",
            Some(false) => "0",
            None => "",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.delta,
            stable,
            r.event_count,
            r.event_ratio,
            r.min_inter_event.map(|v| v.to_string()).unwrap_or_default(),
            r.diverged.map(|v| v.to_string()).unwrap_or_default()
        );
    }
    out
}

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        write(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(dir.join(name))?;
    Ok(())
}
