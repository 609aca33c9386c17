use crate::certificates::dot;
use crate::eventsim::Trace;
use crate::{Error, Result};

fn trapezoid(t: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    t.windows(2).enumerate().map(|(k, w)| 0.5 * (w[1] - w[0]) * (f(k) + f(k + 1))).sum()
}

/// `sqrt(int |y|^2 / int |w|^2)` over the trace with `w = (w1, w2)` and
/// `y = (y_p, y_c)`: an empirical lower bound on the L2 gain.
pub fn l2_gain_estimate(trace: &Trace) -> Result<f64> {
    let out = trapezoid(&trace.t, |k| {
        let s = trace.sample(k);
        dot(s.y_p, s.y_p) + dot(s.y_c, s.y_c)
    });
    let inp = trapezoid(&trace.t, |k| {
        let s = trace.sample(k);
        dot(s.w1, s.w1) + dot(s.w2, s.w2)
    });
    if inp <= 0.0 || inp.is_nan() {
        return Err(Error::ZeroInputEnergy);
    }
    Ok((out / inp).sqrt())
}
