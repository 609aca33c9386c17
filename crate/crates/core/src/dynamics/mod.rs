//! State-space models, fixed-step integration and the built-in model registry.

mod integrator;
mod registry;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use integrator::{rk4_step, rk4_step_raw};
pub use registry::ModelRegistry;

/// A finite real vector (state, input or output of a model).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().all(|v| v.is_finite()) {
            Ok(StateVector(entries))
        } else {
            Err(Error::NonFinite("state vector".into()))
        }
    }

    pub fn zeros(n: usize) -> Self {
        StateVector(vec![0.0; n])
    }

    pub fn scalar(v: f64) -> Result<Self> {
        Self::new(vec![v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for StateVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        StateVector::new(v)
    }
}

impl From<StateVector> for Vec<f64> {
    fn from(v: StateVector) -> Self {
        v.0
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Map `(state, input, time) -> vector`.
pub type VectorField = Arc<dyn Fn(&[f64], &[f64], f64) -> Vec<f64> + Send + Sync>;

/// A continuous-time model `x' = f(x, u, t)`, `y = h(x, u, t)`.
///
/// Cloning is cheap; the maps are shared.
#[derive(Clone)]
pub struct ContinuousSystem {
    name: String,
    state_dim: usize,
    input_dim: usize,
    output_dim: usize,
    has_feedthrough: bool,
    provenance: String,
    deriv: VectorField,
    output: VectorField,
}

impl fmt::Debug for ContinuousSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousSystem")
            .field("name", &self.name)
            .field("state_dim", &self.state_dim)
            .field("input_dim", &self.input_dim)
            .field("output_dim", &self.output_dim)
            .field("has_feedthrough", &self.has_feedthrough)
            .finish()
    }
}

impl ContinuousSystem {
    pub fn new<F, H>(
        name: impl Into<String>,
        (state_dim, input_dim, output_dim): (usize, usize, usize),
        has_feedthrough: bool,
        deriv: F,
        output: H,
    ) -> Self
    where
        F: Fn(&[f64], &[f64], f64) -> Vec<f64> + Send + Sync + 'static,
        H: Fn(&[f64], &[f64], f64) -> Vec<f64> + Send + Sync + 'static,
    {
        ContinuousSystem {
            name: name.into(),
            state_dim,
            input_dim,
            output_dim,
            has_feedthrough,
            provenance: String::new(),
            deriv: Arc::new(deriv),
            output: Arc::new(output),
        }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn has_feedthrough(&self) -> bool {
        self.has_feedthrough
    }

    /// One-line description of where the model's equations come from.
    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Unchecked derivative evaluation on raw slices.
    pub fn deriv_raw(&self, x: &[f64], u: &[f64], t: f64) -> Vec<f64> {
        (self.deriv)(x, u, t)
    }

    /// Unchecked output evaluation on raw slices.
    pub fn output_raw(&self, x: &[f64], u: &[f64], t: f64) -> Vec<f64> {
        (self.output)(x, u, t)
    }

    fn check_dims(&self, x: &StateVector, u: &StateVector) -> Result<()> {
        if x.len() != self.state_dim {
            return Err(Error::Dimension {
                context: format!("{} state", self.name),
                expected: self.state_dim,
                actual: x.len(),
            });
        }
        if u.len() != self.input_dim {
            return Err(Error::Dimension {
                context: format!("{} input", self.name),
                expected: self.input_dim,
                actual: u.len(),
            });
        }
        Ok(())
    }

    /// `y = h(x, u, t)`.
    pub fn evaluate_output(&self, x: &StateVector, u: &StateVector, t: f64) -> Result<StateVector> {
        self.check_dims(x, u)?;
        StateVector::new(self.output_raw(x.as_slice(), u.as_slice(), t))
    }

    /// `x' = f(x, u, t)`.
    pub fn evaluate_derivative(
        &self,
        x: &StateVector,
        u: &StateVector,
        t: f64,
    ) -> Result<StateVector> {
        self.check_dims(x, u)?;
        StateVector::new(self.deriv_raw(x.as_slice(), u.as_slice(), t))
    }
}
