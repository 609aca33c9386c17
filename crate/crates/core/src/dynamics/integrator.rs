use super::{ContinuousSystem, StateVector};
use crate::{Error, Result};

/// Classical fourth-order Runge-Kutta step with the input held constant over
/// `[t, t + dt]`.
pub fn rk4_step(
    sys: &ContinuousSystem,
    x: &StateVector,
    u_hold: &StateVector,
    t: f64,
    dt: f64,
) -> Result<StateVector> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::config(format!("step size must be positive, got {dt}")));
    }
    if x.len() != sys.state_dim() {
        return Err(Error::Dimension {
            context: format!("{} state", sys.name()),
            expected: sys.state_dim(),
            actual: x.len(),
        });
    }
    if u_hold.len() != sys.input_dim() {
        return Err(Error::Dimension {
            context: format!("{} input", sys.name()),
            expected: sys.input_dim(),
            actual: u_hold.len(),
        });
    }
    let next = rk4_step_raw(sys, x.as_slice(), u_hold.as_slice(), t, dt)?;
    Ok(StateVector(next))
}

/// Slice-level RK4 step used by the simulator's inner loop. Dimensions are the
/// caller's responsibility; a non-finite result is reported as divergence.
pub fn rk4_step_raw(
    sys: &ContinuousSystem,
    x: &[f64],
    u: &[f64],
    t: f64,
    dt: f64,
) -> Result<Vec<f64>> {
    let n = x.len();
    let half = 0.5 * dt;
    let mut probe = vec![0.0; n];

    let k1 = sys.deriv_raw(x, u, t);
    for i in 0..n {
        probe[i] = x[i] + half * k1[i];
    }
    let k2 = sys.deriv_raw(&probe, u, t + half);
    for i in 0..n {
        probe[i] = x[i] + half * k2[i];
    }
    let k3 = sys.deriv_raw(&probe, u, t + half);
    for i in 0..n {
        probe[i] = x[i] + dt * k3[i];
    }
    let k4 = sys.deriv_raw(&probe, u, t + dt);

    let next: Vec<f64> = (0..n)
        .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(Error::Divergence { time: t + dt })
    }
}
