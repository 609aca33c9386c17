use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: String,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("simulation diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("algebraic loop: `{plant}` and `{controller}` both have direct feedthrough")]
    AlgebraicLoop { plant: String, controller: String },

    #[error("topology mismatch: certificate is {certificate:?}, trace is {trace:?}")]
    TopologyMismatch {
        certificate: crate::certificates::Topology,
        trace: crate::certificates::Topology,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("input energy is zero, gain estimate undefined")]
    ZeroInputEnergy,
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
