//! Library side of the `etpass` binary: configuration, commands and reports.

pub mod config;
pub mod report;

use std::path::{Path, PathBuf};

use anyhow::Context;
use etpass_core::certificates::{
    interconnection_index_bounds, l2_stable, max_trigger_level, w1_yp_index_bounds, w1_yp_passive, Interconnection,
};
use etpass_core::dynamics::ModelRegistry;
use etpass_core::eventsim::{comm_stats, simulate, summarize, sweep, SweepTarget};
use etpass_core::par::{with_jobs, Exec};
use etpass_core::verify::{
    check_dissipation, io_passivity_series, l2_gain_estimate, proof_step_oracle, qsr_supply_series,
    subsystem_ifofp_series, trace_oracle, Subsystem, VerificationReport,
};

pub use config::{ConfigError, RunConfig};
pub use report::{Report, SWEEP_HEADER};

use report::{sweep_csv, write_atomic, CertificateSection, SimulationSection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Certify,
    Simulate,
    Sweep,
    ListModels,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::ListModels => "list-models",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Worker threads for batch work; 0 uses all cores.
    pub jobs: usize,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Option<Report>,
    pub text: String,
    pub success: bool,
}

/// Exit status: 0 success, 1 failed check or divergence, 2 configuration error.
pub fn exit_code(result: &anyhow::Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.success => 0,
        Ok(_) => 1,
        Err(e) if is_config_error(e) => 2,
        Err(_) => 1,
    }
}

fn is_config_error(e: &anyhow::Error) -> bool {
    use etpass_core::Error as E;
    e.chain().any(|c| {
        c.downcast_ref::<ConfigError>().is_some()
            || matches!(
                c.downcast_ref::<E>(),
                Some(
                    E::Config(_)
                        | E::UnknownModel(_)
                        | E::AlgebraicLoop { .. }
                        | E::Dimension { .. }
                        | E::Hypothesis(_)
                        | E::TopologyMismatch { .. }
                )
            )
    })
}

pub fn run(cmd: Command, opts: &Options) -> anyhow::Result<Outcome> {
    if cmd == Command::ListModels {
        let text = cmd_list_models(&ModelRegistry::builtin());
        return Ok(Outcome { report: None, text, success: true });
    }
    let path = opts.config.as_deref().ok_or_else(|| ConfigError("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = opts.seed {
        cfg.override_seed(seed);
    }
    if let Some(tol) = opts.tol {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(ConfigError(format!("--tol must be finite and >= 0, got {tol}")).into());
        }
        cfg.verify.tol = tol;
    }
    let out_dir = opts
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let registry = ModelRegistry::builtin();
    // Certify never touches the models, but a typo should still be reported.
    registry.get(&cfg.scenario.plant)?;
    registry.get(&cfg.scenario.controller)?;
    let report = match cmd {
        Command::Certify => cmd_certify(&cfg)?,
        Command::Simulate => cmd_simulate(&cfg, &registry, &out_dir, opts.jobs)?,
        Command::Sweep => cmd_sweep(&cfg, &registry, &out_dir, opts.jobs)?,
        Command::ListModels => unreachable!(),
    };
    let text = report.to_text();
    write_atomic(&out_dir, "report.json", |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)
    })
    .context("writing report.json")?;
    write_atomic(&out_dir, "report.txt", |w| w.write_all(text.as_bytes())).context("writing report.txt")?;
    Ok(Outcome { success: report.success, report: Some(report), text })
}

fn certificate_section(ic: &Interconnection, cfg: &RunConfig) -> CertificateSection {
    CertificateSection {
        interconnection: *ic,
        certificate: ic.certificate(),
        stability: l2_stable(&ic.certificate()),
        interconnection_bounds: interconnection_index_bounds(ic, None),
        w1_yp_passivity: w1_yp_passive(ic),
        w1_yp_bounds: w1_yp_index_bounds(ic),
        trigger_limits: max_trigger_level(ic.topology, ic.plant, ic.controller, cfg.trigger.margin),
    }
}

fn new_report(cmd: Command, cfg: &RunConfig) -> Report {
    Report {
        command: cmd.name().to_string(),
        config: cfg.clone(),
        certificate: None,
        simulation: None,
        verification: Vec::new(),
        sweep: None,
        warnings: Vec::new(),
        success: true,
    }
}

/// All closed-form results for the configured interconnection.
pub fn cmd_certify(cfg: &RunConfig) -> anyhow::Result<Report> {
    let ic = cfg.interconnection()?;
    let mut report = new_report(Command::Certify, cfg);
    let section = certificate_section(&ic, cfg);
    report.success = section.stability.q_negative_definite;
    report.certificate = Some(section);
    Ok(report)
}

/// Runs the scenario, writes `trace.csv` and evaluates the requested checks.
pub fn cmd_simulate(cfg: &RunConfig, registry: &ModelRegistry, out_dir: &Path, jobs: usize) -> anyhow::Result<Report> {
    let scn = cfg.scenario(registry)?;
    let ic = scn.interconnection().ok();
    let mut report = new_report(Command::Simulate, cfg);
    report.certificate = ic.as_ref().map(|ic| certificate_section(ic, cfg));

    let (trace, log) = simulate(&scn, registry)?;
    write_atomic(out_dir, "trace.csv", |w| trace.write_csv(w)).context("writing trace.csv")?;

    let tol = cfg.verify.tol;
    let need_ic = |check: &str| {
        ic.ok_or_else(|| ConfigError(format!("check `{check}` needs plant_indices and controller_indices")))
    };
    let mut gain = None;
    for check in &cfg.verify.checks {
        let rep: VerificationReport = match check.as_str() {
            "qsr_supply" => check_dissipation(&qsr_supply_series(&trace, &need_ic(check)?.certificate())?, tol),
            "io_passivity" => {
                check_dissipation(&io_passivity_series(&trace, cfg.verify.eps0, cfg.verify.delta0)?, tol)
            }
            "plant_ifofp" => {
                check_dissipation(&subsystem_ifofp_series(&trace, Subsystem::Plant, need_ic(check)?.plant), tol)
            }
            "controller_ifofp" => check_dissipation(
                &subsystem_ifofp_series(&trace, Subsystem::Controller, need_ic(check)?.controller),
                tol,
            ),
            "proof_oracle" => {
                let ic = need_ic(check)?;
                with_jobs(jobs, || {
                    proof_step_oracle(&ic, cfg.verify.oracle_samples, cfg.verify.oracle_seed, Exec::Parallel)
                })?
            }
            "trace_oracle" => trace_oracle(&trace, &need_ic(check)?)?,
            "l2_gain" => {
                let estimate = l2_gain_estimate(&trace);
                gain = estimate.as_ref().ok().copied();
                VerificationReport {
                    name: String::new(),
                    passed: gain.is_some_and(f64::is_finite),
                    min_cumulative: 0.0,
                    first_violation_time: None,
                    tolerance: 0.0,
                    samples: trace.len(),
                    worst_margin: None,
                    zero_initial_state: trace.zero_initial_state,
                    detail: Some(match estimate {
                        Ok(g) => format!("gain estimate {g}"),
                        Err(e) => e.to_string(),
                    }),
                }
            }
            other => return Err(ConfigError(format!("unknown check `{other}`")).into()),
        };
        report.verification.push(rep.named(check.clone()));
    }

    report.simulation = Some(SimulationSection {
        rows: trace.len(),
        grid_points: scn.grid_points(),
        diverged: trace.diverged,
        comm: comm_stats(&log, &scn),
        summary: summarize(&scn, &trace, &log, SweepTarget::All),
        l2_gain: gain,
        trace_csv: "trace.csv".to_string(),
    });
    if let Some(t) = trace.diverged {
        report.warnings.push(format!("simulation diverged at t = {t}; trace.csv is partial"));
    }
    report.success = trace.diverged.is_none() && report.verification.iter().all(|v| v.passed);
    Ok(report)
}

/// One simulation per trigger level; writes `sweep.csv`.
pub fn cmd_sweep(cfg: &RunConfig, registry: &ModelRegistry, out_dir: &Path, jobs: usize) -> anyhow::Result<Report> {
    let scn = cfg.scenario(registry)?;
    let (target, deltas) = cfg.sweep_plan()?;
    let mut report = new_report(Command::Sweep, cfg);
    if cfg.w1.is_noise() || cfg.w2.is_noise() {
        report.warnings.push("noise input: event counts depend on the seed".to_string());
    }
    let rows = with_jobs(jobs, || sweep(&scn, target, &deltas, registry, Exec::Parallel))?;
    write_atomic(out_dir, "sweep.csv", |w| w.write_all(sweep_csv(&rows).as_bytes())).context("writing sweep.csv")?;
    for r in rows.iter().filter(|r| r.l2_stable == Some(false)) {
        report.warnings.push(format!("delta = {} violates the L2-stability conditions", r.delta));
    }
    report.success = rows.iter().all(|r| r.diverged.is_none());
    report.sweep = Some(rows);
    Ok(report)
}

/// One line per model: name, dimensions, feedthrough and a note on its indices.
pub fn cmd_list_models(registry: &ModelRegistry) -> String {
    let mut out = format!("{} models\n", registry.len());
    for m in registry.iter() {
        out.push_str(&format!(
            "{:<16} state_dim={} input_dim={} output_dim={} feedthrough={}  {}\n",
            m.name(),
            m.state_dim(),
            m.input_dim(),
            m.output_dim(),
            m.has_feedthrough(),
            m.provenance()
        ));
    }
    out
}
