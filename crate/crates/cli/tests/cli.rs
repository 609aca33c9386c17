use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Proc;

use etpass_cli::{exit_code, run, Command, Options, RunConfig, SWEEP_HEADER};
use etpass_core::certificates::{PassivityIndices, Topology, TriggerLevel};
use etpass_core::dynamics::ModelRegistry;
use etpass_core::eventsim::{Scenario, SignalSpec};
use tempfile::TempDir;

fn fixture(n: u32) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("examples/ex{n}.cfg"))
}

fn opts(config: &Path, out: &Path) -> Options {
    Options { config: Some(config.to_path_buf()), out: Some(out.to_path_buf()), ..Options::default() }
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

fn bin(args: &[&str]) -> i32 {
    Proc::new(env!("CARGO_BIN_EXE_etpass")).args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn certify_ex1_values() {
    let out = TempDir::new().unwrap();
    let o = run(Command::Certify, &opts(&fixture(1), out.path())).unwrap();
    assert!(o.success);
    let stab = o.report.unwrap().certificate.unwrap().stability;
    assert!(stab.q_negative_definite);
    assert!((stab.conditions[0].value - 0.1).abs() < 1e-12);
    assert!((stab.conditions[1].value - 1.55).abs() < 1e-12);
    assert!(out.path().join("report.json").exists());
    assert!(out.path().join("report.txt").exists());
}

#[test]
fn certify_ex4_w1_yp_passive() {
    let out = TempDir::new().unwrap();
    let o = run(Command::Certify, &opts(&fixture(4), out.path())).unwrap();
    let cert = o.report.unwrap().certificate.unwrap();
    assert!(cert.w1_yp_passivity.passive);
    assert!(cert.stability.q_negative_definite);
}

#[test]
fn zero_trigger_level_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(fixture(1)).unwrap().replace("trigger.delta_p = 0.3", "trigger.delta_p = 0.0");
    let cfg = write_cfg(dir.path(), &text);
    let res = run(Command::Certify, &opts(&cfg, dir.path()));
    assert!(res.is_err());
    assert_eq!(exit_code(&res), 2);
    assert_eq!(bin(&["certify", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]), 2);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(bin(&["certify", "--config", fixture(1).to_str().unwrap(), "--out", d]), 0);
    assert_eq!(bin(&["certify", "--config", "/nonexistent/cfg.toml", "--out", d]), 2);
    assert_eq!(bin(&["list-models"]), 0);

    let unknown = write_cfg(dir.path(), &fs::read_to_string(fixture(1)).unwrap().replace("ex1_plant", "nope"));
    assert_eq!(bin(&["certify", "--config", unknown.to_str().unwrap(), "--out", d]), 2);

    // A falsified index claim is a failed check, not a config error.
    let text = fs::read_to_string(fixture(3)).unwrap().replace("verify.delta0 = 0.3", "verify.delta0 = 5.0");
    assert_ne!(text, fs::read_to_string(fixture(3)).unwrap());
    let falsified = write_cfg(dir.path(), &text);
    assert_eq!(bin(&["simulate", "--config", falsified.to_str().unwrap(), "--out", d]), 1);
}

#[test]
fn simulate_ex2_writes_full_trace() {
    let out = TempDir::new().unwrap();
    let o = run(Command::Simulate, &opts(&fixture(2), out.path())).unwrap();
    assert!(o.success, "{}", o.text);
    let csv = fs::read_to_string(out.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 20_002);
    let sim = o.report.unwrap().simulation.unwrap();
    assert_eq!(sim.rows, 20_001);
    assert!(sim.diverged.is_none());
}

#[test]
fn zero_input_ex4_stays_at_rest() {
    let out = TempDir::new().unwrap();
    let o = run(Command::Simulate, &opts(&fixture(4), out.path())).unwrap();
    assert!(o.success);
    let csv = fs::read_to_string(out.path().join("trace.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for line in lines {
        for (name, v) in header.iter().zip(line.split(',')) {
            if *name == "t" || name.starts_with("event") {
                continue;
            }
            assert_eq!(v.parse::<f64>().unwrap(), 0.0, "{name} nonzero in {line}");
        }
    }
}

#[test]
fn both_sides_populates_both_event_columns() {
    let out = TempDir::new().unwrap();
    let o = run(Command::Simulate, &opts(&fixture(7), out.path())).unwrap();
    let csv = fs::read_to_string(out.path().join("trace.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |n: &str| header.iter().position(|h| *h == n).unwrap();
    let (ep, ec) = (col("event_p"), col("event_c"));
    let (mut np, mut nc) = (0, 0);
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        np += usize::from(f[ep] == "1");
        nc += usize::from(f[ec] == "1");
    }
    assert!(np > 0 && nc > 0);
    let comm = o.report.unwrap().simulation.unwrap().comm;
    assert_eq!(comm.plant.unwrap().count, np);
    assert_eq!(comm.controller.unwrap().count, nc);
}

#[test]
fn sweep_ex2() {
    let out = TempDir::new().unwrap();
    let o = run(Command::Sweep, &opts(&fixture(2), out.path())).unwrap();
    assert!(o.success);
    let report = o.report.unwrap();
    let rows = report.sweep.unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows[7].event_ratio <= rows[0].event_ratio);
    assert_eq!(rows[4].l2_stable, Some(true));
    assert_eq!(rows[8].l2_stable, Some(false));
    assert!(report.warnings.iter().any(|w| w.contains("delta = 0.9")));
    assert!(report.warnings.iter().any(|w| w.contains("noise")));
    let csv = fs::read_to_string(out.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), SWEEP_HEADER);
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn single_point_sweep_matches_simulate() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(fixture(2))
        .unwrap()
        .replace("sweep.deltas = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]", "sweep.deltas = [0.5]");
    let cfg = write_cfg(dir.path(), &text);
    let sw = run(Command::Sweep, &opts(&cfg, dir.path())).unwrap().report.unwrap().sweep.unwrap();
    let sim = run(Command::Simulate, &opts(&cfg, dir.path())).unwrap().report.unwrap().simulation.unwrap();
    assert_eq!(sw, vec![sim.summary]);
}

#[test]
fn list_models() {
    let o = run(Command::ListModels, &Options::default()).unwrap();
    let lines: Vec<&str> = o.text.lines().collect();
    assert_eq!(lines[0], "11 models");
    assert_eq!(lines.len(), 12);
    let find = |name: &str| *lines.iter().find(|l| l.starts_with(&format!("{name} "))).unwrap();
    assert!(find("ex1_plant").contains("state_dim=2"));
    assert!(find("ex8_plant").contains("feedthrough=true"));
    assert!(find("ex1_plant").contains("feedthrough=false"));
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = run(Command::Simulate, &opts(&fixture(8), &a)).unwrap();
    let echoed = first.report.as_ref().unwrap().config.to_toml_string();
    let cfg = write_cfg(dir.path(), &echoed);
    let second = run(Command::Simulate, &opts(&cfg, &b)).unwrap();
    let verdicts = |o: &etpass_cli::Outcome| {
        o.report.as_ref().unwrap().verification.iter().map(|v| (v.name.clone(), v.passed)).collect::<Vec<_>>()
    };
    assert_eq!(verdicts(&first), verdicts(&second));
    assert_eq!(fs::read(a.join("trace.csv")).unwrap(), fs::read(b.join("trace.csv")).unwrap());
}

#[test]
fn seed_flag_changes_noise_only() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let mut o = opts(&fixture(1), &a);
    o.seed = Some(7);
    run(Command::Simulate, &o).unwrap();
    o.out = Some(b.clone());
    run(Command::Simulate, &o).unwrap();
    let ta = fs::read(a.join("trace.csv")).unwrap();
    assert_eq!(ta, fs::read(b.join("trace.csv")).unwrap());
    o.seed = Some(8);
    run(Command::Simulate, &o).unwrap();
    assert_ne!(ta, fs::read(b.join("trace.csv")).unwrap());
}

fn idx(nu: f64, rho: f64) -> PassivityIndices {
    PassivityIndices::new(nu, rho).unwrap()
}

fn lvl(v: f64) -> Option<TriggerLevel> {
    Some(TriggerLevel::new(v).unwrap())
}

fn scenario(n: u32) -> Scenario {
    RunConfig::load(&fixture(n)).unwrap().scenario(&ModelRegistry::builtin()).unwrap()
}

#[test]
fn fixtures_match_reference_scenarios() {
    let sine = SignalSpec::Sinusoid { amplitude: 1.0, angular_freq: 2.5 * std::f64::consts::PI, phase: 0.0, offset: 0.0 };
    let step = SignalSpec::Step { time: 1.0, level: 1.0 };

    let s3 = scenario(3);
    let mut want = Scenario::new(Topology::PlantSide, "ex2_plant", "ex2_controller", lvl(0.3), None);
    want.p_indices = Some(idx(0.0, 1.0));
    want.c_indices = Some(idx(0.3, 0.5));
    want.w1 = sine.clone();
    assert_eq!(s3, want);

    let s6 = scenario(6);
    let mut want = Scenario::new(Topology::ControllerSide, "ex4_plant", "ex4_controller", None, lvl(0.2));
    want.p_indices = Some(idx(0.0, -0.2));
    want.c_indices = Some(idx(1.0, 0.3));
    want.w1 = step;
    assert_eq!(s6, want);

    let s9 = scenario(9);
    let mut want = Scenario::new(Topology::BothSides, "ex7_plant", "ex7_controller", lvl(0.55), lvl(0.55));
    want.p_indices = Some(idx(0.0, 0.9));
    want.c_indices = Some(idx(0.0, 1.0));
    want.w1 = SignalSpec::Sinusoid { amplitude: 1.0, angular_freq: 2.5 * std::f64::consts::PI, phase: 0.0, offset: 3.0 };
    assert_eq!(s9, want);

    for n in 1..=9 {
        let s = scenario(n);
        assert_eq!(s.grid_points(), 20_001, "ex{n}");
        assert!(s.interconnection().is_ok(), "ex{n}");
    }
}
