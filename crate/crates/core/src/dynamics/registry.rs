use std::collections::BTreeMap;

use super::ContinuousSystem;
use crate::{Error, Result};

/// Named collection of models.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    entries: BTreeMap<String, ContinuousSystem>,
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The eleven built-in plants and controllers.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        for model in [
            ex1_plant(),
            ex1_controller(),
            ex2_plant(),
            ex2_controller(),
            ex4_plant(),
            ex4_controller(),
            ex5_plant(),
            ex5_controller(),
            ex7_plant(),
            ex7_controller(),
            ex8_plant(),
        ] {
            reg.insert(model);
        }
        reg
    }

    pub fn insert(&mut self, model: ContinuousSystem) {
        self.entries.insert(model.name().to_string(), model);
    }

    pub fn get(&self, name: &str) -> Result<&ContinuousSystem> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::UnknownModel(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Models in name order.
    pub fn iter(&self) -> impl Iterator<Item = &ContinuousSystem> {
        self.entries.values()
    }
}

fn ex1_plant() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex1_plant",
        (2, 1, 1),
        false,
        |x, u, _| {
            vec![
                -3.0 * x[0].powi(3) + x[0] * x[1],
                -0.8 * x[1] + 2.0 * u[0],
            ]
        },
        |x, _, _| vec![x[1]],
    )
    .with_provenance("IF-OFP(nu=0, rho=0.4)")
}

// No passivating input transformation is applied; the raw dynamics are used.
fn ex1_controller() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex1_controller",
        (1, 1, 1),
        true,
        |x, u, _| vec![-3.0 * x[0] + u[0]],
        |x, u, _| vec![7.0 * x[0] + u[0]],
    )
    .with_provenance("unpassivated realization; nominal indices nu=0, rho=1.8 (not met by this realization)")
}

fn ex2_plant() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex2_plant",
        (2, 1, 1),
        false,
        |x, u, _| vec![x[1], -0.5 * x[0].powi(3) - x[1] + u[0]],
        |x, _, _| vec![x[1]],
    )
    .with_provenance("IF-OFP(nu=0, rho=1), storage x1^4/8 + x2^2/2")
}

fn ex2_controller() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex2_controller",
        (2, 1, 1),
        true,
        |x, u, _| {
            vec![
                -2.0 * x[0] - x[1] + u[0],
                -3.0 * x[0] - 5.0 * x[1] + 2.0 * u[0],
            ]
        },
        |x, u, _| vec![x[0] + x[1] + u[0]],
    )
    .with_provenance("IF-OFP(nu=0.3, rho=0.5)")
}

fn ex4_plant() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex4_plant",
        (2, 1, 1),
        false,
        |x, u, _| {
            vec![
                -3.0 * x[0].powi(3) + x[0] * x[1],
                0.2 * x[1] + 2.0 * u[0],
            ]
        },
        |x, _, _| vec![x[1]],
    )
    .with_provenance("IF-OFP(nu=0, rho=-0.2)")
}

fn ex4_controller() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex4_controller",
        (1, 1, 1),
        true,
        |x, u, _| vec![-3.0 * x[0] + u[0]],
        |x, u, _| vec![7.0 * x[0] + u[0]],
    )
    .with_provenance("nominal indices nu=1, rho=0.3 (not met by this realization)")
}

fn ex5_plant() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex5_plant",
        (1, 1, 1),
        true,
        |x, u, _| vec![-x[0] + u[0]],
        |x, u, _| vec![x[0] - 0.25 * u[0]],
    )
    .with_provenance("nominal indices nu=-0.37, rho=2")
}

// Constant output offset, no feedthrough. Also the controller for ex8.
fn ex5_controller() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex5_controller",
        (1, 1, 1),
        false,
        |x, u, _| vec![-x[0] + u[0]],
        |x, _, _| vec![-0.5 * x[0] + 1.0],
    )
    .with_provenance("output offset +1; nominal indices nu=0.5, rho=1")
}

fn ex7_plant() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex7_plant",
        (2, 1, 1),
        false,
        |x, u, _| vec![x[1], -0.6 * x[0].powi(3) - 0.9 * x[1] + u[0]],
        |x, _, _| vec![x[1]],
    )
    .with_provenance("IF-OFP(nu=0, rho=0.9)")
}

fn ex7_controller() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex7_controller",
        (2, 1, 1),
        false,
        |x, u, _| vec![x[1], -x[0] - x[1].powi(3) + u[0]],
        |x, _, _| vec![x[1]],
    )
    .with_provenance("nominal indices nu=0, rho=1")
}

/// (0.05 s^2 + 2.1 s + 1.1) / (s^2 + 2 s + 2) in controllable canonical form.
fn ex8_plant() -> ContinuousSystem {
    ContinuousSystem::new(
        "ex8_plant",
        (2, 1, 1),
        true,
        |x, u, _| vec![x[1], -2.0 * x[0] - 2.0 * x[1] + u[0]],
        |x, u, _| vec![x[0] + 2.0 * x[1] + 0.05 * u[0]],
    )
    .with_provenance("(0.05s^2+2.1s+1.1)/(s^2+2s+2); nominal indices nu=0.02, rho=0.8")
}
