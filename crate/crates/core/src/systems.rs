//! The Van der Pol, Chua and Lorenz vector fields.
//!
//! The two singularly perturbed systems are stored in explicit form: the fast
//! equation `eps * x1' = g(x)` is integrated as `x1' = g(x) / eps`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{State, VectorField};

/// Above this value of epsilon the two time scales are no longer well
/// separated.
pub const SLOW_FAST_EPSILON_LIMIT: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemId {
    VanDerPol,
    Chua,
    Lorenz,
}

impl SystemId {
    pub const ALL: [SystemId; 3] = [SystemId::VanDerPol, SystemId::Chua, SystemId::Lorenz];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::VanDerPol => "vanderpol",
            SystemId::Chua => "chua",
            SystemId::Lorenz => "lorenz",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            SystemId::VanDerPol => 2,
            SystemId::Chua | SystemId::Lorenz => 3,
        }
    }

    /// Initial state of the preset run: (2, 0), (0.1, 0.1, 0.1) and
    /// (0, 1, 0) respectively.
    pub fn preset_initial_state(self) -> Vec<f64> {
        match self {
            SystemId::VanDerPol => vec![2.0, 0.0],
            SystemId::Chua => vec![0.1, 0.1, 0.1],
            SystemId::Lorenz => vec![0.0, 1.0, 0.0],
        }
    }

    pub fn preset_t_final(self) -> f64 {
        match self {
            SystemId::VanDerPol => 10.0,
            SystemId::Chua => 100.0,
            SystemId::Lorenz => 50.0,
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SystemId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "system".into(),
                reason: format!("unknown system `{s}` (expected vanderpol, chua or lorenz)"),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VanDerPolParams {
    pub epsilon: f64,
}

impl Default for VanDerPolParams {
    fn default() -> Self {
        Self { epsilon: 1.0 / 20.0 }
    }
}

/// Only epsilon and mu are tunable; the cubic and linear coefficients of the
/// model are fixed constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChuaParams {
    pub epsilon: f64,
    pub mu: f64,
}

impl Default for ChuaParams {
    fn default() -> Self {
        Self {
            epsilon: 1.0 / 20.0,
            mu: 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub r: f64,
    pub beta: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            r: 28.0,
            beta: 8.0 / 3.0,
        }
    }
}

const CHUA_CUBIC: f64 = 44.0 / 3.0;
const CHUA_QUADRATIC: f64 = 41.0 / 2.0;
const CHUA_X1_COUPLING: f64 = 0.7;
const CHUA_X3_GAIN: f64 = 0.24;

/// A builtin vector field together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "system", rename_all = "lowercase")]
pub enum SystemSpec {
    VanDerPol(VanDerPolParams),
    Chua(ChuaParams),
    Lorenz(LorenzParams),
}

impl SystemSpec {
    pub fn preset(id: SystemId) -> Self {
        match id {
            SystemId::VanDerPol => SystemSpec::VanDerPol(VanDerPolParams::default()),
            SystemId::Chua => SystemSpec::Chua(ChuaParams::default()),
            SystemId::Lorenz => SystemSpec::Lorenz(LorenzParams::default()),
        }
    }

    pub fn vanderpol(epsilon: f64) -> Self {
        SystemSpec::VanDerPol(VanDerPolParams { epsilon })
    }

    pub fn chua(epsilon: f64, mu: f64) -> Self {
        SystemSpec::Chua(ChuaParams { epsilon, mu })
    }

    pub fn lorenz(sigma: f64, r: f64, beta: f64) -> Self {
        SystemSpec::Lorenz(LorenzParams { sigma, r, beta })
    }

    pub fn id(&self) -> SystemId {
        match self {
            SystemSpec::VanDerPol(_) => SystemId::VanDerPol,
            SystemSpec::Chua(_) => SystemId::Chua,
            SystemSpec::Lorenz(_) => SystemId::Lorenz,
        }
    }

    pub fn dimension(&self) -> usize {
        self.id().dimension()
    }

    /// Parameter names and values in canonical order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            SystemSpec::VanDerPol(p) => vec![("epsilon", p.epsilon)],
            SystemSpec::Chua(p) => vec![("epsilon", p.epsilon), ("mu", p.mu)],
            SystemSpec::Lorenz(p) => vec![("sigma", p.sigma), ("r", p.r), ("beta", p.beta)],
        }
    }

    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match (self, name) {
            (SystemSpec::VanDerPol(p), "epsilon") => &mut p.epsilon,
            (SystemSpec::Chua(p), "epsilon") => &mut p.epsilon,
            (SystemSpec::Chua(p), "mu") => &mut p.mu,
            (SystemSpec::Lorenz(p), "sigma") => &mut p.sigma,
            (SystemSpec::Lorenz(p), "r") => &mut p.r,
            (SystemSpec::Lorenz(p), "beta") => &mut p.beta,
            (spec, _) => {
                let known: Vec<_> = spec.params().iter().map(|(n, _)| *n).collect();
                return Err(Error::InvalidParameter {
                    name: name.to_string(),
                    reason: format!(
                        "not a parameter of {} (known: {})",
                        spec.id(),
                        known.join(", ")
                    ),
                });
            }
        };
        *slot = value;
        Ok(())
    }

    /// Checks parameter invariants. Returns warnings that do not prevent a
    /// run (currently only a weak time-scale separation).
    pub fn validate_params(&self) -> Result<Vec<String>> {
        for (name, value) in self.params() {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        let epsilon = match *self {
            SystemSpec::VanDerPol(p) => Some(p.epsilon),
            SystemSpec::Chua(p) => Some(p.epsilon),
            SystemSpec::Lorenz(_) => None,
        };
        let mut warnings = Vec::new();
        if let Some(eps) = epsilon {
            if eps <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "epsilon".into(),
                    reason: format!("must be > 0, got {eps}"),
                });
            }
            if eps > SLOW_FAST_EPSILON_LIMIT {
                warnings.push(format!(
                    "epsilon = {eps} exceeds {SLOW_FAST_EPSILON_LIMIT}; slow-fast structure is weak"
                ));
            }
        }
        Ok(warnings)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::domain(format!(
                "{} expects a state of dimension {}, got {}",
                self.id(),
                self.dimension(),
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("state must be finite"));
        }
        Ok(())
    }

    pub fn eval_rhs(&self, s: &State) -> Result<Vec<f64>> {
        self.check_dim(&s.x)?;
        let mut dx = vec![0.0; s.x.len()];
        self.eval(s.t, &s.x, &mut dx);
        Ok(dx)
    }

    /// Analytic Jacobian of the explicit-form right-hand side, row-major.
    pub fn eval_jacobian(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(x)?;
        Ok(match *self {
            SystemSpec::VanDerPol(VanDerPolParams { epsilon }) => vec![
                vec![(1.0 - x[0] * x[0]) / epsilon, 1.0 / epsilon],
                vec![-1.0, 0.0],
            ],
            SystemSpec::Chua(ChuaParams { epsilon, mu }) => vec![
                vec![
                    (-3.0 * CHUA_CUBIC * x[0] * x[0] - 2.0 * CHUA_QUADRATIC * x[0] - mu) / epsilon,
                    0.0,
                    1.0 / epsilon,
                ],
                vec![0.0, 0.0, -1.0],
                vec![-CHUA_X1_COUPLING, 1.0, CHUA_X3_GAIN],
            ],
            SystemSpec::Lorenz(LorenzParams { sigma, r, beta }) => vec![
                vec![-sigma, sigma, 0.0],
                vec![r - x[2], -1.0, -x[0]],
                vec![x[1], x[0], -beta],
            ],
        })
    }
}

impl VectorField for SystemSpec {
    fn dim(&self) -> usize {
        self.dimension()
    }

    fn eval(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        match *self {
            SystemSpec::VanDerPol(VanDerPolParams { epsilon }) => {
                dx[0] = (x[0] + x[1] - x[0] * x[0] * x[0] / 3.0) / epsilon;
                dx[1] = -x[0];
            }
            SystemSpec::Chua(ChuaParams { epsilon, mu }) => {
                let x1 = x[0];
                dx[0] = (x[2] - CHUA_CUBIC * x1 * x1 * x1 - CHUA_QUADRATIC * x1 * x1 - mu * x1)
                    / epsilon;
                dx[1] = -x[2];
                dx[2] = -CHUA_X1_COUPLING * x1 + x[1] + CHUA_X3_GAIN * x[2];
            }
            SystemSpec::Lorenz(LorenzParams { sigma, r, beta }) => {
                dx[0] = sigma * (x[1] - x[0]);
                dx[1] = -x[0] * x[2] + r * x[0] - x[1];
                dx[2] = x[0] * x[1] - beta * x[2];
            }
        }
    }

    fn spec(&self) -> Option<&SystemSpec> {
        Some(self)
    }
}
