//! Run configuration: a TOML file, normally written with dotted keys
//! (`scenario.topology = "plant_side"`, `w1.kind = "sinusoid"`, ...).

use std::fmt;
use std::path::Path;

use etpass_core::certificates::{Interconnection, PassivityIndices, Topology, TriggerLevel};
use etpass_core::dynamics::{ModelRegistry, StateVector};
use etpass_core::eventsim::{Scenario, SignalSpec, SweepTarget};
use serde::{Deserialize, Serialize};

/// A problem with the configuration; maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<etpass_core::Error> for ConfigError {
    fn from(e: etpass_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plant_indices: Option<IndicesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controller_indices: Option<IndicesSection>,
    #[serde(default)]
    pub trigger: TriggerSection,
    #[serde(default)]
    pub w1: SignalSection,
    #[serde(default)]
    pub w2: SignalSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub topology: String,
    pub plant: String,
    pub controller: String,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0_p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0_c: Option<Vec<f64>>,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_duration() -> f64 {
    20.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicesSection {
    pub nu: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_c: Option<f64>,
    /// Slack kept by the trigger-limit computation.
    #[serde(default)]
    pub margin: f64,
}

/// Flat signal description; which fields apply depends on `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    #[serde(default = "zero_kind")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_freq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hold_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn zero_kind() -> String {
    "zero".to_string()
}

impl Default for SignalSection {
    fn default() -> Self {
        SignalSection {
            kind: zero_kind(),
            level: None,
            time: None,
            amplitude: None,
            angular_freq: None,
            phase: None,
            offset: None,
            power: None,
            hold_dt: None,
            seed: None,
        }
    }
}

impl SignalSection {
    /// Resolves defaults: step at `t = 1` with level 1, unit sinusoid
    /// amplitude, noise held over `dt` with seed 0.
    pub fn to_spec(&self, name: &str, dt: f64) -> Result<SignalSpec, ConfigError> {
        let allowed: &[&str] = match self.kind.as_str() {
            "zero" => &[],
            "constant" => &["level"],
            "step" => &["level", "time"],
            "sinusoid" => &["amplitude", "angular_freq", "phase", "offset"],
            "white_noise" => &["power", "hold_dt", "seed"],
            other => return err(format!("{name}.kind: unknown signal kind `{other}`")),
        };
        let present = [
            ("level", self.level.is_some()),
            ("time", self.time.is_some()),
            ("amplitude", self.amplitude.is_some()),
            ("angular_freq", self.angular_freq.is_some()),
            ("phase", self.phase.is_some()),
            ("offset", self.offset.is_some()),
            ("power", self.power.is_some()),
            ("hold_dt", self.hold_dt.is_some()),
            ("seed", self.seed.is_some()),
        ];
        if let Some((field, _)) = present.iter().find(|(f, p)| *p && !allowed.contains(f)) {
            return err(format!("{name}.{field} does not apply to kind `{}`", self.kind));
        }
        let need = |v: Option<f64>, field: &str| v.ok_or_else(|| ConfigError(format!("{name}.{field} is required")));
        let spec = match self.kind.as_str() {
            "zero" => SignalSpec::Zero,
            "constant" => SignalSpec::Constant { level: need(self.level, "level")? },
            "step" => SignalSpec::Step { time: self.time.unwrap_or(1.0), level: self.level.unwrap_or(1.0) },
            "sinusoid" => SignalSpec::Sinusoid {
                amplitude: self.amplitude.unwrap_or(1.0),
                angular_freq: need(self.angular_freq, "angular_freq")?,
                phase: self.phase.unwrap_or(0.0),
                offset: self.offset.unwrap_or(0.0),
            },
            _ => SignalSpec::WhiteNoise {
                power: need(self.power, "power")?,
                hold_dt: self.hold_dt.unwrap_or(dt),
                seed: self.seed.unwrap_or(0),
            },
        };
        spec.validate().map_err(|e| ConfigError(format!("{name}: {e}")))?;
        Ok(spec)
    }

    pub fn is_noise(&self) -> bool {
        self.kind == "white_noise"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub eps0: f64,
    #[serde(default)]
    pub delta0: f64,
    #[serde(default = "default_oracle_samples")]
    pub oracle_samples: usize,
    #[serde(default)]
    pub oracle_seed: u64,
}

fn default_tol() -> f64 {
    1e-6
}

fn default_oracle_samples() -> usize {
    100_000
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            tol: default_tol(),
            checks: Vec::new(),
            eps0: 0.0,
            delta0: 0.0,
            oracle_samples: default_oracle_samples(),
            oracle_seed: 0,
        }
    }
}

pub const CHECKS: [&str; 7] =
    ["qsr_supply", "io_passivity", "plant_ifofp", "controller_ifofp", "proof_oracle", "trace_oracle", "l2_gain"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub deltas: Vec<f64>,
    /// `plant`, `controller` or `all` (default).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// Replaces noise seeds: `w1` gets `seed`, `w2` gets `seed + 1`.
    pub fn override_seed(&mut self, seed: u64) {
        if self.w1.is_noise() {
            self.w1.seed = Some(seed);
        }
        if self.w2.is_noise() {
            self.w2.seed = Some(seed.wrapping_add(1));
        }
    }

    pub fn topology(&self) -> Result<Topology, ConfigError> {
        Ok(self.scenario.topology.parse::<Topology>()?)
    }

    fn level(v: Option<f64>, name: &str) -> Result<Option<TriggerLevel>, ConfigError> {
        v.map(|d| TriggerLevel::new(d).map_err(|e| ConfigError(format!("{name}: {e}"))))
            .transpose()
    }

    pub fn indices(&self) -> Result<Option<(PassivityIndices, PassivityIndices)>, ConfigError> {
        match (self.plant_indices, self.controller_indices) {
            (None, None) => Ok(None),
            (Some(p), Some(c)) => Ok(Some((PassivityIndices::new(p.nu, p.rho)?, PassivityIndices::new(c.nu, c.rho)?))),
            _ => err("plant_indices and controller_indices must be given together"),
        }
    }

    pub fn interconnection(&self) -> Result<Interconnection, ConfigError> {
        let (p, c) = self
            .indices()?
            .ok_or_else(|| ConfigError("plant_indices and controller_indices are required".into()))?;
        Ok(Interconnection::new(
            self.topology()?,
            p,
            c,
            Self::level(self.trigger.delta_p, "trigger.delta_p")?,
            Self::level(self.trigger.delta_c, "trigger.delta_c")?,
        )?)
    }

    pub fn scenario(&self, registry: &ModelRegistry) -> Result<Scenario, ConfigError> {
        let s = &self.scenario;
        let topology = self.topology()?;
        for name in [&s.plant, &s.controller] {
            registry.get(name)?;
        }
        let delta_p = Self::level(self.trigger.delta_p, "trigger.delta_p")?;
        let delta_c = Self::level(self.trigger.delta_c, "trigger.delta_c")?;
        if topology.detects_plant() != delta_p.is_some() {
            return err(format!("trigger.delta_p must be {} for {topology}", if delta_p.is_some() { "absent" } else { "set" }));
        }
        if topology.detects_controller() != delta_c.is_some() {
            return err(format!("trigger.delta_c must be {} for {topology}", if delta_c.is_some() { "absent" } else { "set" }));
        }
        if !(s.dt > 0.0 && s.dt.is_finite() && s.duration >= s.dt && s.duration.is_finite()) {
            return err(format!("need 0 < scenario.dt <= scenario.duration, got dt={}, duration={}", s.dt, s.duration));
        }
        for check in &self.verify.checks {
            if !CHECKS.contains(&check.as_str()) {
                return err(format!("unknown check `{check}` (known: {})", CHECKS.join(", ")));
            }
        }
        let state = |v: &Option<Vec<f64>>, name: &str| {
            v.clone()
                .map(StateVector::new)
                .transpose()
                .map_err(|e| ConfigError(format!("scenario.{name}: {e}")))
        };
        let mut scn = Scenario::new(topology, s.plant.clone(), s.controller.clone(), delta_p, delta_c);
        if let Some((p, c)) = self.indices()? {
            scn.p_indices = Some(p);
            scn.c_indices = Some(c);
        }
        scn.w1 = self.w1.to_spec("w1", s.dt)?;
        scn.w2 = self.w2.to_spec("w2", s.dt)?;
        scn.dt = s.dt;
        scn.duration = s.duration;
        scn.x0_p = state(&s.x0_p, "x0_p")?;
        scn.x0_c = state(&s.x0_c, "x0_c")?;
        Ok(scn)
    }

    pub fn sweep_plan(&self) -> Result<(SweepTarget, Vec<TriggerLevel>), ConfigError> {
        let sw = self.sweep.as_ref().ok_or_else(|| ConfigError("sweep.deltas is required".into()))?;
        if sw.deltas.is_empty() {
            return err("sweep.deltas is empty");
        }
        let deltas = sw
            .deltas
            .iter()
            .map(|&d| TriggerLevel::new(d).map_err(|e| ConfigError(format!("sweep.deltas: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let target = match sw.target.as_deref().unwrap_or("all") {
            "plant" => SweepTarget::Plant,
            "controller" => SweepTarget::Controller,
            "all" => SweepTarget::All,
            other => return err(format!("sweep.target: expected plant, controller or all, got `{other}`")),
        };
        Ok((target, deltas))
    }
}
