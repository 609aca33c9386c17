use serde::{Deserialize, Serialize};

use super::detector::EventDetectorState;
use super::signal::SignalSpec;
use super::stats::EventLog;
use super::trace::{Row, Trace};
use crate::certificates::{Interconnection, PassivityIndices, Topology, TriggerLevel};
use crate::dynamics::{rk4_step_raw, ContinuousSystem, ModelRegistry, StateVector};
use crate::{Error, Result};

/// A closed-loop run: models by registry name, trigger levels, exogenous
/// inputs and the integration grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub topology: Topology,
    pub plant: String,
    pub controller: String,
    /// Indices used for certification; the simulation itself ignores them.
    pub p_indices: Option<PassivityIndices>,
    pub c_indices: Option<PassivityIndices>,
    pub delta_p: Option<TriggerLevel>,
    pub delta_c: Option<TriggerLevel>,
    pub w1: SignalSpec,
    pub w2: SignalSpec,
    pub dt: f64,
    pub duration: f64,
    /// `None` starts from the origin.
    pub x0_p: Option<StateVector>,
    pub x0_c: Option<StateVector>,
}

impl Scenario {
    /// Zero inputs, origin start, `dt = 1e-3`, `duration = 20`.
    pub fn new(
        topology: Topology,
        plant: impl Into<String>,
        controller: impl Into<String>,
        delta_p: Option<TriggerLevel>,
        delta_c: Option<TriggerLevel>,
    ) -> Self {
        Scenario {
            topology,
            plant: plant.into(),
            controller: controller.into(),
            p_indices: None,
            c_indices: None,
            delta_p,
            delta_c,
            w1: SignalSpec::Zero,
            w2: SignalSpec::Zero,
            dt: 1e-3,
            duration: 20.0,
            x0_p: None,
            x0_c: None,
        }
    }

    /// Number of integration steps; the grid has `steps() + 1` points.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn grid_points(&self) -> usize {
        self.steps() + 1
    }

    /// The certified interconnection, when both index pairs are given.
    pub fn interconnection(&self) -> Result<Interconnection> {
        let missing = || Error::config("scenario has no passivity indices");
        Interconnection::new(
            self.topology,
            self.p_indices.ok_or_else(missing)?,
            self.c_indices.ok_or_else(missing)?,
            self.delta_p,
            self.delta_c,
        )
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.duration >= self.dt && self.duration.is_finite()) {
            return Err(Error::config(format!("duration must be at least dt, got {}", self.duration)));
        }
        if self.topology.detects_plant() != self.delta_p.is_some() {
            return Err(Error::config(format!("delta_p does not match topology {}", self.topology)));
        }
        if self.topology.detects_controller() != self.delta_c.is_some() {
            return Err(Error::config(format!("delta_c does not match topology {}", self.topology)));
        }
        self.w1.validate()?;
        self.w2.validate()
    }

    fn initial_states(&self, plant: &ContinuousSystem, controller: &ContinuousSystem) -> Result<(Vec<f64>, Vec<f64>)> {
        let pick = |x0: &Option<StateVector>, sys: &ContinuousSystem| -> Result<Vec<f64>> {
            match x0 {
                None => Ok(vec![0.0; sys.state_dim()]),
                Some(x) if x.len() == sys.state_dim() => Ok(x.as_slice().to_vec()),
                Some(x) => Err(Error::Dimension {
                    context: format!("initial state of `{}`", sys.name()),
                    expected: sys.state_dim(),
                    actual: x.len(),
                }),
            }
        };
        Ok((pick(&self.x0_p, plant)?, pick(&self.x0_c, controller)?))
    }
}

fn check_wiring(plant: &ContinuousSystem, controller: &ContinuousSystem) -> Result<usize> {
    let width = plant.output_dim();
    for (context, expected, actual) in [
        ("plant input", width, plant.input_dim()),
        ("controller input", width, controller.input_dim()),
        ("controller output", width, controller.output_dim()),
    ] {
        if expected != actual {
            return Err(Error::Dimension { context: context.to_string(), expected, actual });
        }
    }
    if plant.has_feedthrough() && controller.has_feedthrough() {
        return Err(Error::AlgebraicLoop {
            plant: plant.name().to_string(),
            controller: controller.name().to_string(),
        });
    }
    Ok(width)
}

// Passes `y` through the detector (if the side has one) and returns the value
// that crosses the network plus whether an event fired.
fn transmit(det: &mut Option<EventDetectorState>, delta: Option<TriggerLevel>, y: &[f64], t: f64) -> (Vec<f64>, bool) {
    match (det.as_mut(), delta) {
        (_, None) => (y.to_vec(), false),
        (None, Some(delta)) => {
            *det = Some(EventDetectorState::start(delta, y, t));
            (y.to_vec(), true)
        }
        (Some(state), Some(_)) => {
            let fired = state.observe(y, t);
            (state.held_output.clone(), fired)
        }
    }
}

fn all_finite(vs: &[&[f64]]) -> bool {
    vs.iter().all(|v| v.iter().all(|x| x.is_finite()))
}

/// Simulates the closed loop on the grid `t_k = k dt`.
///
/// At each grid point the raw outputs are evaluated (a subsystem without
/// feedthrough first), detectors are checked against them and refreshed on a
/// trigger, the inputs are wired, and both states are advanced by one RK4 step
/// with the inputs held. Every detector transmits at `t = 0`. A non-finite
/// value ends the run early with `Trace::diverged` set.
pub fn simulate(scn: &Scenario, registry: &ModelRegistry) -> Result<(Trace, EventLog)> {
    scn.validate()?;
    let plant = registry.get(&scn.plant)?;
    let controller = registry.get(&scn.controller)?;
    let width = check_wiring(plant, controller)?;
    let (mut xp, mut xc) = scn.initial_states(plant, controller)?;

    let mut trace = Trace::new(scn.topology, width);
    trace.zero_initial_state = xp.iter().chain(&xc).all(|&v| v == 0.0);
    let mut det_p: Option<EventDetectorState> = None;
    let mut det_c: Option<EventDetectorState> = None;
    let zeros = vec![0.0; width];
    let plant_first = !plant.has_feedthrough();
    let n = scn.steps();

    for k in 0..=n {
        let t = k as f64 * scn.dt;
        let w1 = vec![scn.w1.sample(t); width];
        let w2 = vec![scn.w2.sample(t); width];
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<f64>>();
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<f64>>();

        let (y_p, y_c, yp_sent, yc_sent, ev_p, ev_c, u_p, u_c);
        if plant_first {
            y_p = plant.output_raw(&xp, &zeros, t);
            (yp_sent, ev_p) = transmit(&mut det_p, scn.delta_p, &y_p, t);
            u_c = add(&w2, &yp_sent);
            y_c = controller.output_raw(&xc, &u_c, t);
            (yc_sent, ev_c) = transmit(&mut det_c, scn.delta_c, &y_c, t);
            u_p = sub(&w1, &yc_sent);
        } else {
            y_c = controller.output_raw(&xc, &zeros, t);
            (yc_sent, ev_c) = transmit(&mut det_c, scn.delta_c, &y_c, t);
            u_p = sub(&w1, &yc_sent);
            y_p = plant.output_raw(&xp, &u_p, t);
            (yp_sent, ev_p) = transmit(&mut det_p, scn.delta_p, &y_p, t);
            u_c = add(&w2, &yp_sent);
        }
        if !all_finite(&[&w1, &w2, &y_p, &y_c, &u_p, &u_c]) {
            trace.diverged = Some(t);
            break;
        }

        let side = |has: bool, held: &[f64], y: &[f64]| {
            if has {
                (held.to_vec(), sub(y, held))
            } else {
                (zeros.clone(), zeros.clone())
            }
        };
        let (y_p_held, e_p) = side(scn.delta_p.is_some(), &yp_sent, &y_p);
        let (y_c_held, e_c) = side(scn.delta_c.is_some(), &yc_sent, &y_c);
        trace.push(Row {
            t,
            w1,
            w2,
            u_p: u_p.clone(),
            u_c: u_c.clone(),
            y_p,
            y_c,
            y_p_held,
            y_c_held,
            e_p,
            e_c,
            event_p: ev_p,
            event_c: ev_c,
        });
        if k == n {
            break;
        }

        let next = rk4_step_raw(plant, &xp, &u_p, t, scn.dt)
            .and_then(|p| rk4_step_raw(controller, &xc, &u_c, t, scn.dt).map(|c| (p, c)));
        match next {
            Ok((p, c)) => (xp, xc) = (p, c),
            Err(Error::Divergence { time }) => {
                trace.diverged = Some(time);
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let log = EventLog::from_trace(&trace);
    Ok((trace, log))
}

/// Open-loop response of a single subsystem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenLoopTrace {
    pub system: String,
    pub input_width: usize,
    pub output_width: usize,
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub zero_initial_state: bool,
    pub diverged: Option<f64>,
}

/// Drives `sys` with `u` (applied to every input channel, held over each step).
pub fn open_loop(
    sys: &ContinuousSystem,
    x0: Option<&StateVector>,
    u: &SignalSpec,
    dt: f64,
    duration: f64,
) -> Result<OpenLoopTrace> {
    if !(dt > 0.0 && dt.is_finite() && duration >= dt && duration.is_finite()) {
        return Err(Error::config(format!("invalid grid dt={dt}, duration={duration}")));
    }
    u.validate()?;
    let mut x = match x0 {
        None => vec![0.0; sys.state_dim()],
        Some(x) if x.len() == sys.state_dim() => x.as_slice().to_vec(),
        Some(x) => {
            return Err(Error::Dimension {
                context: format!("initial state of `{}`", sys.name()),
                expected: sys.state_dim(),
                actual: x.len(),
            })
        }
    };
    let mut out = OpenLoopTrace {
        system: sys.name().to_string(),
        input_width: sys.input_dim(),
        output_width: sys.output_dim(),
        t: Vec::new(),
        u: Vec::new(),
        y: Vec::new(),
        zero_initial_state: x.iter().all(|&v| v == 0.0),
        diverged: None,
    };
    let n = (duration / dt).round() as usize;
    for k in 0..=n {
        let t = k as f64 * dt;
        let uk = vec![u.sample(t); sys.input_dim()];
        let y = sys.output_raw(&x, &uk, t);
        if !all_finite(&[&uk, &y]) {
            out.diverged = Some(t);
            break;
        }
        out.t.push(t);
        out.u.extend_from_slice(&uk);
        out.y.extend_from_slice(&y);
        if k == n {
            break;
        }
        match rk4_step_raw(sys, &x, &uk, t, dt) {
            Ok(next) => x = next,
            Err(Error::Divergence { time }) => {
                out.diverged = Some(time);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
