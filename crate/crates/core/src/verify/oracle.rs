use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::supply::VerificationReport;
use crate::certificates::{Interconnection, QsrCertificate};
use crate::eventsim::Trace;
use crate::par::{self, Exec};
use crate::{Error, Result};

/// Margin below which a sample counts as a violation.
pub const ORACLE_TOL: f64 = 1e-9;

const CHUNK: usize = 1 << 16;

/// The storage-derivative bound before any inequality is applied:
/// the sum of both IF-OFP supplies with the interconnection substituted.
///
/// `e_p = y_p - (sent y_p)`, `e_c` likewise; sides without a detector ignore
/// their error argument.
#[allow(clippy::too_many_arguments)]
pub fn exact_supply(ic: &Interconnection, w1: f64, w2: f64, y_p: f64, y_c: f64, e_p: f64, e_c: f64) -> f64 {
    let (p, c) = (ic.plant, ic.controller);
    let (e_p, e_c) = (
        if ic.topology.detects_plant() { e_p } else { 0.0 },
        if ic.topology.detects_controller() { e_c } else { 0.0 },
    );
    let u_p = w1 + e_c - y_c;
    let u_c = w2 + y_p - e_p;
    u_p * y_p - p.nu * u_p * u_p - p.rho * y_p * y_p + u_c * y_c - c.nu * u_c * u_c - c.rho * y_c * y_c
}

#[derive(Debug, Clone, Copy)]
struct ChunkResult {
    worst: f64,
    worst_tuple: [f64; 6],
    violations: usize,
    first_violation: Option<usize>,
}

fn draw_error(rng: &mut ChaCha8Rng, y: f64, delta: f64, boundary: bool) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let u: f64 = rng.random();
    let scale = if boundary { 1.0 } else { u };
    if z == 0.0 {
        return 0.0;
    }
    z * (delta.sqrt() * y.abs() * scale / z.abs()).min(1.0)
}

fn run_chunk(ic: &Interconnection, cert: &QsrCertificate, seed: u64, chunk: usize, count: usize) -> ChunkResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    let dp = ic.delta_p.map_or(0.0, |d| d.value());
    let dc = ic.delta_c.map_or(0.0, |d| d.value());
    let mut out = ChunkResult { worst: f64::INFINITY, worst_tuple: [0.0; 6], violations: 0, first_violation: None };
    for i in 0..count {
        let w1: f64 = rng.sample(StandardNormal);
        let w2: f64 = rng.sample(StandardNormal);
        let y_p: f64 = rng.sample(StandardNormal);
        let y_c: f64 = rng.sample(StandardNormal);
        // Every eighth draw sits on the constraint boundary.
        let boundary = i % 8 == 0;
        let e_p = draw_error(&mut rng, y_p, dp, boundary);
        let e_c = draw_error(&mut rng, y_c, dc, boundary);
        let margin = cert.supply(&[w1], &[w2], &[y_p], &[y_c]) - exact_supply(ic, w1, w2, y_p, y_c, e_p, e_c);
        if margin < out.worst {
            out.worst = margin;
            out.worst_tuple = [w1, w2, y_p, y_c, e_p, e_c];
        }
        if margin < -ORACLE_TOL {
            out.violations += 1;
            out.first_violation.get_or_insert(chunk * CHUNK + i);
        }
    }
    out
}

/// Samples `(w1, w2, y_p, y_c)` and admissible errors (`e^2 <= delta y^2`) and
/// checks that the certificate's quadratic form dominates the exact supply.
///
/// Results do not depend on `exec`: each chunk of samples has its own
/// random stream.
pub fn proof_step_oracle(ic: &Interconnection, samples: usize, seed: u64, exec: Exec) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::config("oracle needs at least one sample"));
    }
    let cert = ic.certificate();
    let chunks: Vec<usize> = (0..samples.div_ceil(CHUNK)).collect();
    let results = par::map(exec, chunks, |k| {
        let count = CHUNK.min(samples - k * CHUNK);
        run_chunk(ic, &cert, seed, k, count)
    });
    let violations: usize = results.iter().map(|r| r.violations).sum();
    let worst = results
        .iter()
        .min_by(|a, b| a.worst.total_cmp(&b.worst))
        .expect("at least one chunk");
    let first = results.iter().find_map(|r| r.first_violation);
    let [w1, w2, y_p, y_c, e_p, e_c] = worst.worst_tuple;
    Ok(VerificationReport {
        name: "proof_oracle".to_string(),
        passed: violations == 0,
        min_cumulative: worst.worst,
        first_violation_time: None,
        tolerance: ORACLE_TOL,
        samples,
        worst_margin: Some(worst.worst),
        zero_initial_state: true,
        detail: Some(format!(
            "{violations} violation(s){}; worst at w1={w1}, w2={w2}, y_p={y_p}, y_c={y_c}, e_p={e_p}, e_c={e_c}",
            first.map(|i| format!(", first at sample {i}")).unwrap_or_default()
        )),
    })
}

/// Feeds every recorded sample of a scalar trace through the same pointwise
/// comparison as [`proof_step_oracle`].
pub fn trace_oracle(trace: &Trace, ic: &Interconnection) -> Result<VerificationReport> {
    if trace.topology != ic.topology {
        return Err(Error::TopologyMismatch { certificate: ic.topology, trace: trace.topology });
    }
    let cert = ic.certificate();
    let mut worst = f64::INFINITY;
    let mut first = None;
    for s in trace.samples() {
        let sum_exact: f64 = (0..trace.width)
            .map(|i| exact_supply(ic, s.w1[i], s.w2[i], s.y_p[i], s.y_c[i], s.e_p[i], s.e_c[i]))
            .sum();
        let margin = cert.supply(s.w1, s.w2, s.y_p, s.y_c) - sum_exact;
        worst = worst.min(margin);
        if margin < -ORACLE_TOL && first.is_none() {
            first = Some(s.t);
        }
    }
    Ok(VerificationReport {
        name: "trace_oracle".to_string(),
        passed: first.is_none(),
        min_cumulative: worst,
        first_violation_time: first,
        tolerance: ORACLE_TOL,
        samples: trace.len(),
        worst_margin: Some(worst),
        zero_initial_state: trace.zero_initial_state,
        detail: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{PassivityIndices, TriggerLevel};

    fn idx(nu: f64, rho: f64) -> PassivityIndices {
        PassivityIndices::new(nu, rho).unwrap()
    }

    fn d(v: f64) -> TriggerLevel {
        TriggerLevel::new(v).unwrap()
    }

    #[test]
    fn margin_with_zero_error_is_a_square() {
        // nu_c = 0, e = 0: the gap is (1/2 y_c)^2 - ... only dropped squares remain.
        let ic = Interconnection::plant_side(idx(0.0, 1.0), idx(0.0, 0.5), d(1e-6));
        let cert = ic.certificate();
        for &(w1, w2, yp, yc) in &[(1.0, -2.0, 0.5, 0.3), (0.0, 0.0, 1.0, -1.0), (3.0, 1.0, -2.0, 4.0)] {
            let m = cert.supply(&[w1], &[w2], &[yp], &[yc]) - exact_supply(&ic, w1, w2, yp, yc, 0.0, 0.0);
            assert!(m >= -1e-12, "{m}");
        }
    }

    #[test]
    fn all_topologies_hold() {
        let cases = [
            Interconnection::plant_side(idx(0.0, 1.0), idx(0.3, 0.5), d(0.5)),
            Interconnection::plant_side(idx(0.2, 0.4), idx(-0.3, 1.8), d(0.1)),
            Interconnection::controller_side(idx(0.0, -0.2), idx(1.0, 0.3), d(0.2)),
            Interconnection::controller_side(idx(-0.37, 2.0), idx(0.5, 1.0), d(0.1)),
            Interconnection::both_sides(idx(0.02, 0.8), idx(0.5, 1.0), d(0.02), d(0.7)),
            Interconnection::both_sides(idx(-0.1, 0.9), idx(0.0, 1.0), d(0.3), d(0.4)),
        ];
        for ic in cases {
            let r = proof_step_oracle(&ic, 20_000, 11, Exec::Sequential).unwrap();
            assert!(r.passed, "{ic:?}: {:?}", r.detail);
        }
    }

    #[test]
    fn detects_a_wrong_certificate() {
        // Errors far outside the admissible set must break the bound.
        let ic = Interconnection::plant_side(idx(0.0, 1.0), idx(0.0, 0.5), d(0.5));
        let cert = ic.certificate();
        let m = cert.supply(&[0.0], &[0.0], &[1.0], &[1.0]) - exact_supply(&ic, 0.0, 0.0, 1.0, 1.0, -10.0, 0.0);
        assert!(m < -ORACLE_TOL);
    }

    #[test]
    fn exec_modes_agree() {
        let ic = Interconnection::both_sides(idx(0.02, 0.8), idx(0.5, 1.0), d(0.02), d(0.7));
        let a = proof_step_oracle(&ic, 200_000, 5, Exec::Sequential).unwrap();
        let b = proof_step_oracle(&ic, 200_000, 5, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(proof_step_oracle(&ic, 0, 5, Exec::Sequential).is_err());
    }
}
