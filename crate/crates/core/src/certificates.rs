//! Closed-form dissipativity certificates for the three detector placements.
//!
//! Every interconnection here is a negative feedback loop of a plant `G_p` and a
//! controller `G_c`, each IF-OFP with indices `(nu, rho)`, where one or both
//! outputs cross the network through an event detector with trigger level
//! `delta`. The resulting closed loop is QSR-dissipative from `w = (w1, w2)` to
//! `y = (y_p, y_c)` with block-diagonal `Q`, `R` and a fixed `S`; all blocks are
//! scalar multiples of the identity, so a certificate is a handful of scalars.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// IF-OFP indices: dissipative w.r.t. `u'y - rho y'y - nu u'u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassivityIndices {
    pub nu: f64,
    pub rho: f64,
}

impl PassivityIndices {
    pub fn new(nu: f64, rho: f64) -> Result<Self> {
        if nu.is_finite() && rho.is_finite() {
            Ok(PassivityIndices { nu, rho })
        } else {
            Err(Error::config(format!("passivity indices must be finite (nu={nu}, rho={rho})")))
        }
    }
}

/// Relative trigger threshold `delta` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TriggerLevel(f64);

impl TriggerLevel {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta <= 1.0 {
            Ok(TriggerLevel(delta))
        } else {
            Err(Error::config(format!("trigger level must lie in (0, 1], got {delta}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TriggerLevel {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        TriggerLevel::new(v)
    }
}

impl From<TriggerLevel> for f64 {
    fn from(d: TriggerLevel) -> f64 {
        d.0
    }
}

/// Which outputs pass through an event detector and hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    PlantSide,
    ControllerSide,
    BothSides,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::PlantSide, Topology::ControllerSide, Topology::BothSides];

    pub fn detects_plant(self) -> bool {
        matches!(self, Topology::PlantSide | Topology::BothSides)
    }

    pub fn detects_controller(self) -> bool {
        matches!(self, Topology::ControllerSide | Topology::BothSides)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::PlantSide => "plant_side",
            Topology::ControllerSide => "controller_side",
            Topology::BothSides => "both_sides",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plant_side" | "plant" => Ok(Topology::PlantSide),
            "controller_side" | "controller" => Ok(Topology::ControllerSide),
            "both_sides" | "both" => Ok(Topology::BothSides),
            other => Err(Error::config(format!("unknown topology `{other}`"))),
        }
    }
}

/// A validated interconnection: topology, both index pairs and the trigger
/// levels the topology needs (and only those).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interconnection {
    pub topology: Topology,
    pub plant: PassivityIndices,
    pub controller: PassivityIndices,
    pub delta_p: Option<TriggerLevel>,
    pub delta_c: Option<TriggerLevel>,
}

impl Interconnection {
    pub fn new(
        topology: Topology,
        plant: PassivityIndices,
        controller: PassivityIndices,
        delta_p: Option<TriggerLevel>,
        delta_c: Option<TriggerLevel>,
    ) -> Result<Self> {
        match (topology.detects_plant(), delta_p.is_some()) {
            (true, false) => return Err(Error::config(format!("{topology} requires delta_p"))),
            (false, true) => return Err(Error::config(format!("{topology} has no plant-side detector, delta_p must be absent"))),
            _ => {}
        }
        match (topology.detects_controller(), delta_c.is_some()) {
            (true, false) => return Err(Error::config(format!("{topology} requires delta_c"))),
            (false, true) => return Err(Error::config(format!("{topology} has no controller-side detector, delta_c must be absent"))),
            _ => {}
        }
        Ok(Interconnection { topology, plant, controller, delta_p, delta_c })
    }

    pub fn plant_side(plant: PassivityIndices, controller: PassivityIndices, delta: TriggerLevel) -> Self {
        Interconnection { topology: Topology::PlantSide, plant, controller, delta_p: Some(delta), delta_c: None }
    }

    pub fn controller_side(plant: PassivityIndices, controller: PassivityIndices, delta: TriggerLevel) -> Self {
        Interconnection { topology: Topology::ControllerSide, plant, controller, delta_p: None, delta_c: Some(delta) }
    }

    pub fn both_sides(
        plant: PassivityIndices,
        controller: PassivityIndices,
        delta_p: TriggerLevel,
        delta_c: TriggerLevel,
    ) -> Self {
        Interconnection {
            topology: Topology::BothSides,
            plant,
            controller,
            delta_p: Some(delta_p),
            delta_c: Some(delta_c),
        }
    }

    /// `beta(nu_c)`, defined when the plant output is event-triggered.
    pub fn beta_c(&self) -> Option<f64> {
        self.delta_p.map(|d| beta_nu_c(self.plant.rho, self.controller.nu, d))
    }

    /// `beta(nu_p)`, defined when the controller output is event-triggered.
    pub fn beta_p(&self) -> Option<f64> {
        self.delta_c.map(|d| beta_nu_p(self.controller.rho, self.plant.nu, d))
    }

    pub fn certificate(&self) -> QsrCertificate {
        qsr_certificate(self)
    }
}

/// The piecewise `beta` shared by every result: `rho` is the output index of
/// the detected subsystem, `nu` the input index of the subsystem receiving the
/// held signal.
fn beta(rho: f64, nu: f64, delta: f64) -> f64 {
    if nu > 0.0 {
        rho - nu - delta * (1.0 + nu)
    } else if nu == 0.0 {
        rho - delta
    } else {
        rho + 2.0 * nu - delta * (1.0 - 3.0 * nu)
    }
}

/// `beta(nu_c)` for a detector on the plant output.
pub fn beta_nu_c(rho_p: f64, nu_c: f64, delta_p: TriggerLevel) -> f64 {
    beta(rho_p, nu_c, delta_p.value())
}

/// `beta(nu_p)` for a detector on the controller output.
pub fn beta_nu_p(rho_c: f64, nu_p: f64, delta_c: TriggerLevel) -> f64 {
    beta(rho_c, nu_p, delta_c.value())
}

/// Scalar coefficients of the QSR supply rate
/// `w'Rw + 2 w'Sy + y'Qy` with `w = (w1, w2)`, `y = (y_p, y_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QsrCertificate {
    pub topology: Topology,
    pub q_p: f64,
    pub q_c: f64,
    pub s11: f64,
    pub s12: f64,
    pub s21: f64,
    pub s22: f64,
    pub r_p: f64,
    pub r_c: f64,
    pub beta_c: Option<f64>,
    pub beta_p: Option<f64>,
}

impl QsrCertificate {
    /// Evaluates the supply rate; the four slices share one channel width.
    pub fn supply(&self, w1: &[f64], w2: &[f64], y_p: &[f64], y_c: &[f64]) -> f64 {
        self.r_p * dot(w1, w1)
            + self.r_c * dot(w2, w2)
            + 2.0
                * (self.s11 * dot(w1, y_p)
                    + self.s12 * dot(w1, y_c)
                    + self.s21 * dot(w2, y_p)
                    + self.s22 * dot(w2, y_c))
            + self.q_p * dot(y_p, y_p)
            + self.q_c * dot(y_c, y_c)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds the QSR certificate for an interconnection.
pub fn qsr_certificate(ic: &Interconnection) -> QsrCertificate {
    let (p, c) = (ic.plant, ic.controller);
    let beta_c = ic.beta_c();
    let beta_p = ic.beta_p();
    let (q_p, q_c, r_p, r_c) = match ic.topology {
        Topology::PlantSide => (
            -beta_c.expect("validated"),
            -(c.rho + p.nu - 0.25),
            -p.nu,
            -(c.nu - c.nu.abs()),
        ),
        Topology::ControllerSide => (
            -(p.rho + c.nu - 0.25),
            -beta_p.expect("validated"),
            -(p.nu - p.nu.abs()),
            -c.nu,
        ),
        Topology::BothSides => (
            -(beta_c.expect("validated") - 0.25),
            -(beta_p.expect("validated") - 0.25),
            -(p.nu - p.nu.abs()),
            -(c.nu - c.nu.abs()),
        ),
    };
    QsrCertificate {
        topology: ic.topology,
        q_p,
        q_c,
        s11: 0.5,
        s12: p.nu,
        s21: -c.nu,
        s22: 0.5,
        r_p,
        r_c,
        beta_c,
        beta_p,
    }
}

/// How a condition's value is compared with zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Positive,
    NonNegative,
    Zero,
}

impl Relation {
    fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Relation::Positive => value > tol,
            Relation::NonNegative => value >= -tol,
            Relation::Zero => value.abs() <= tol,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Positive => "> 0",
            Relation::NonNegative => ">= 0",
            Relation::Zero => "= 0",
        }
    }
}

/// One scalar inequality of a certificate condition, with its numeric value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub satisfied: bool,
}

impl Condition {
    fn new(name: &str, value: f64, relation: Relation, tol: f64) -> Self {
        Condition { name: name.to_string(), value, relation, satisfied: relation.holds(value, tol) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub certificate: QsrCertificate,
    pub q_negative_definite: bool,
    pub conditions: Vec<Condition>,
}

/// L2-stability verdict: `Q < 0`, i.e. both diagonal blocks negative.
pub fn l2_stable(cert: &QsrCertificate) -> StabilityReport {
    l2_stable_with_tol(cert, 0.0)
}

/// As [`l2_stable`], but a condition only counts as satisfied when it exceeds `tol`.
pub fn l2_stable_with_tol(cert: &QsrCertificate, tol: f64) -> StabilityReport {
    let (name_p, name_c) = match cert.topology {
        Topology::PlantSide => ("beta(nu_c)", "rho_c + nu_p - 1/4"),
        Topology::ControllerSide => ("rho_p + nu_c - 1/4", "beta(nu_p)"),
        Topology::BothSides => ("beta(nu_c) - 1/4", "beta(nu_p) - 1/4"),
    };
    let conditions = vec![
        Condition::new(name_p, -cert.q_p, Relation::Positive, tol),
        Condition::new(name_c, -cert.q_c, Relation::Positive, tol),
    ];
    StabilityReport {
        certificate: *cert,
        q_negative_definite: conditions.iter().all(|c| c.satisfied),
        conditions,
    }
}

/// Admissible passivity indices `(eps0, delta0)` of the closed loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexBounds {
    /// Supremum of admissible `eps0`.
    pub eps_sup: f64,
    /// The `eps0` at which `delta_sup` was evaluated.
    pub eps0: f64,
    /// Supremum (or maximum, see `delta_inclusive`) of admissible `delta0`.
    pub delta_sup: f64,
    pub delta_inclusive: bool,
    /// A nonnegative `(eps0, delta0)` pair exists at the evaluated `eps0`.
    pub feasible: bool,
    /// A ratio in the bound had a vanishing (or sign-flipped) denominator.
    pub degenerate: bool,
}

// `base - num/den`, where `den` must be positive for the bound to make sense.
// With `num == den == 0` the ratio carries no constraint and only `base`
// remains; any other non-positive denominator leaves no admissible delta0.
fn ratio_term(base: f64, num: f64, den: f64) -> (f64, bool) {
    if den > 0.0 {
        (base - num / den, false)
    } else if den == 0.0 && num == 0.0 {
        (base, false)
    } else {
        (f64::NEG_INFINITY, true)
    }
}

/// Passivity indices from `w = (w1, w2)` to `y = (y_p, y_c)`.
///
/// `eps0` defaults to its supremum; the returned `delta_sup` is the strict
/// bound on `delta0` at that `eps0`.
pub fn interconnection_index_bounds(ic: &Interconnection, eps0: Option<f64>) -> IndexBounds {
    let (p, c) = (ic.plant, ic.controller);
    let soft = |nu: f64| nu - nu.abs();
    let eps_sup = match ic.topology {
        Topology::PlantSide => p.nu.min(soft(c.nu)),
        Topology::ControllerSide => c.nu.min(soft(p.nu)),
        Topology::BothSides => soft(c.nu).min(soft(p.nu)),
    };
    let eps0 = eps0.unwrap_or(eps_sup);
    let (t1, t2) = match ic.topology {
        Topology::PlantSide => (
            ratio_term(ic.beta_c().expect("validated"), c.nu * c.nu, soft(c.nu) - eps0),
            ratio_term(c.rho + p.nu - 0.25, p.nu * p.nu, p.nu - eps0),
        ),
        Topology::ControllerSide => (
            ratio_term(ic.beta_p().expect("validated"), p.nu * p.nu, soft(p.nu) - eps0),
            ratio_term(p.rho + c.nu - 0.25, c.nu * c.nu, c.nu - eps0),
        ),
        Topology::BothSides => (
            ratio_term(ic.beta_c().expect("validated") - 0.25, c.nu * c.nu, soft(c.nu) - eps0),
            ratio_term(ic.beta_p().expect("validated") - 0.25, p.nu * p.nu, soft(p.nu) - eps0),
        ),
    };
    let delta_sup = t1.0.min(t2.0);
    let degenerate = t1.1 || t2.1;
    IndexBounds {
        eps_sup,
        eps0,
        delta_sup,
        delta_inclusive: false,
        feasible: !degenerate && eps_sup >= 0.0 && eps0 >= 0.0 && eps0 <= eps_sup && delta_sup >= 0.0,
        degenerate,
    }
}

/// Verdict for passivity from `w1` to `y_p` (with `w2 = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassivityReport {
    pub topology: Topology,
    pub passive: bool,
    pub conditions: Vec<Condition>,
}

/// Passivity from `w1` to `y_p` under `w2 = 0`.
pub fn w1_yp_passive(ic: &Interconnection) -> PassivityReport {
    w1_yp_passive_with_tol(ic, 0.0)
}

pub fn w1_yp_passive_with_tol(ic: &Interconnection, tol: f64) -> PassivityReport {
    let (p, c) = (ic.plant, ic.controller);
    let conditions = match ic.topology {
        Topology::PlantSide => vec![
            Condition::new("beta(nu_c)", ic.beta_c().expect("validated"), Relation::NonNegative, tol),
            Condition::new("nu_p", p.nu, Relation::Positive, tol),
            Condition::new("rho_c - 1/4", c.rho - 0.25, Relation::Positive, tol),
        ],
        Topology::ControllerSide => vec![
            Condition::new(
                "rho_c - delta",
                c.rho - ic.delta_c.expect("validated").value(),
                Relation::NonNegative,
                tol,
            ),
            Condition::new("nu_p", p.nu, Relation::Zero, tol),
            Condition::new("rho_p + nu_c - 1/4", p.rho + c.nu - 0.25, Relation::NonNegative, tol),
        ],
        Topology::BothSides => vec![
            Condition::new("beta(nu_p) - 1/4", ic.beta_p().expect("validated") - 0.25, Relation::NonNegative, tol),
            Condition::new("nu_p", p.nu, Relation::Zero, tol),
            Condition::new("beta(nu_c) - 1/4", ic.beta_c().expect("validated") - 0.25, Relation::NonNegative, tol),
        ],
    };
    PassivityReport {
        topology: ic.topology,
        passive: conditions.iter().all(|c| c.satisfied),
        conditions,
    }
}

/// Passivity indices from `w1` to `y_p` (with `w2 = 0`); `delta0` may attain
/// `delta_sup`.
pub fn w1_yp_index_bounds(ic: &Interconnection) -> IndexBounds {
    let (p, c) = (ic.plant, ic.controller);
    match ic.topology {
        Topology::PlantSide => {
            let den = c.rho + p.nu - 0.25;
            let delta_sup = ic.beta_c().expect("validated");
            // The ratio bound on eps0 comes from dividing by `den`; it is only
            // valid when `den > 0`.
            let degenerate = den <= 0.0;
            let eps_sup = if degenerate { f64::NAN } else { p.nu.min(p.nu * (c.rho - 0.25) / den) };
            IndexBounds {
                eps_sup,
                eps0: eps_sup,
                delta_sup,
                delta_inclusive: true,
                feasible: !degenerate && eps_sup >= 0.0 && delta_sup >= 0.0,
                degenerate,
            }
        }
        Topology::ControllerSide => {
            let beta_p = ic.beta_p().expect("validated");
            let delta_sup = p.rho + c.nu - 0.25;
            let degenerate = beta_p <= 0.0 && p.nu != 0.0;
            let ratio = if p.nu == 0.0 { 0.0 } else { p.nu * p.nu / beta_p };
            let eps_sup = if degenerate { f64::NAN } else { p.nu.min(p.nu - p.nu.abs() - ratio) };
            IndexBounds {
                eps_sup,
                eps0: eps_sup,
                delta_sup,
                delta_inclusive: true,
                feasible: !degenerate && beta_p > 0.0 && eps_sup >= 0.0 && delta_sup >= 0.0,
                degenerate,
            }
        }
        Topology::BothSides => {
            let delta_sup = ic.beta_c().expect("validated") - 0.25;
            let beta_p = ic.beta_p().expect("validated");
            IndexBounds {
                eps_sup: 0.0,
                eps0: 0.0,
                delta_sup,
                delta_inclusive: true,
                feasible: p.nu == 0.0 && beta_p >= 0.25 && delta_sup >= 0.0,
                degenerate: false,
            }
        }
    }
}

/// Largest trigger levels keeping the L2-stability conditions satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriggerLimits {
    /// `None` when the topology has no plant-side detector.
    pub delta_p_max: Option<f64>,
    pub delta_c_max: Option<f64>,
    pub feasible: bool,
}

// Supremum of delta with beta(rho, nu, delta) > floor. beta is affine and
// strictly decreasing in delta on every branch.
fn beta_inverse(rho: f64, nu: f64, floor: f64) -> f64 {
    let (intercept, slope) = if nu > 0.0 {
        (rho - nu, 1.0 + nu)
    } else if nu == 0.0 {
        (rho, 1.0)
    } else {
        (rho + 2.0 * nu, 1.0 - 3.0 * nu)
    };
    (intercept - floor) / slope
}

/// Inverts the L2-stability conditions for the largest admissible `delta`
/// values, each condition keeping slack greater than `margin`.
///
/// Returned levels are suprema (the condition is strict) clamped to 1; an
/// infeasible topology reports zeros with `feasible == false`.
pub fn max_trigger_level(
    topology: Topology,
    p: PassivityIndices,
    c: PassivityIndices,
    margin: f64,
) -> TriggerLimits {
    let margin = margin.max(0.0);
    let (fixed_ok, dp, dc) = match topology {
        Topology::PlantSide => (c.rho + p.nu - 0.25 > margin, Some(beta_inverse(p.rho, c.nu, margin)), None),
        Topology::ControllerSide => (p.rho + c.nu - 0.25 > margin, None, Some(beta_inverse(c.rho, p.nu, margin))),
        Topology::BothSides => (
            true,
            Some(beta_inverse(p.rho, c.nu, 0.25 + margin)),
            Some(beta_inverse(c.rho, p.nu, 0.25 + margin)),
        ),
    };
    let feasible = fixed_ok && dp.is_none_or(|d| d > 0.0) && dc.is_none_or(|d| d > 0.0);
    let clamp = |d: f64| if feasible { d.min(1.0) } else { 0.0 };
    TriggerLimits { delta_p_max: dp.map(clamp), delta_c_max: dc.map(clamp), feasible }
}
