use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Scalar exogenous signal; applied to every element of a vector channel.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    #[default]
    Zero,
    Constant {
        level: f64,
    },
    /// `level` for `t >= time`, zero before.
    Step {
        time: f64,
        level: f64,
    },
    Sinusoid {
        amplitude: f64,
        angular_freq: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Band-limited white noise: piecewise constant over windows of `hold_dt`,
    /// each level normal with variance `power / hold_dt`.
    WhiteNoise {
        power: f64,
        hold_dt: f64,
        seed: u64,
    },
}

impl SignalSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("signal parameter `{name}` must be finite")))
            }
        };
        match *self {
            SignalSpec::Zero => Ok(()),
            SignalSpec::Constant { level } => finite("level", level),
            SignalSpec::Step { time, level } => finite("time", time).and(finite("level", level)),
            SignalSpec::Sinusoid { amplitude, angular_freq, phase, offset } => finite("amplitude", amplitude)
                .and(finite("angular_freq", angular_freq))
                .and(finite("phase", phase))
                .and(finite("offset", offset)),
            SignalSpec::WhiteNoise { power, hold_dt, .. } => {
                if !(power >= 0.0 && power.is_finite()) {
                    Err(Error::config(format!("noise power must be finite and >= 0, got {power}")))
                } else if !(hold_dt > 0.0 && hold_dt.is_finite()) {
                    Err(Error::config(format!("noise hold_dt must be positive, got {hold_dt}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Value at time `t`.
    pub fn sample(&self, t: f64) -> f64 {
        match *self {
            SignalSpec::Zero => 0.0,
            SignalSpec::Constant { level } => level,
            SignalSpec::Step { time, level } => {
                if t >= time {
                    level
                } else {
                    0.0
                }
            }
            SignalSpec::Sinusoid { amplitude, angular_freq, phase, offset } => {
                amplitude * (angular_freq * t + phase).sin() + offset
            }
            SignalSpec::WhiteNoise { power, hold_dt, seed } => {
                if power == 0.0 {
                    return 0.0;
                }
                // The small bias keeps grid points that land on a window edge
                // (up to rounding) in the window they start.
                let window = (t / hold_dt + 1e-9).floor().max(0.0) as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(window);
                let z: f64 = StandardNormal.sample(&mut rng);
                z * (power / hold_dt).sqrt()
            }
        }
    }

    /// Copy with the noise seed replaced; other kinds are returned unchanged.
    pub fn with_seed(&self, new_seed: u64) -> SignalSpec {
        match *self {
            SignalSpec::WhiteNoise { power, hold_dt, .. } => SignalSpec::WhiteNoise { power, hold_dt, seed: new_seed },
            ref other => other.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            SignalSpec::Zero => true,
            SignalSpec::Constant { level } | SignalSpec::Step { level, .. } => level == 0.0,
            SignalSpec::Sinusoid { amplitude, offset, .. } => amplitude == 0.0 && offset == 0.0,
            SignalSpec::WhiteNoise { power, .. } => power == 0.0,
        }
    }
}

/// Free-function form of [`SignalSpec::sample`].
pub fn sample_signal(spec: &SignalSpec, t: f64) -> f64 {
    spec.sample(t)
}
