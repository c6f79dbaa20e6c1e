//! Runge-Kutta integration: fixed-step RK4, the Dormand-Prince 5(4) embedded
//! pair, adaptive step control and cubic Hermite dense output.

mod dense;
mod integrate;
mod rk;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::systems::SystemSpec;

pub use dense::dense_interpolate;
pub use integrate::{integrate, Stepper};
pub use rk::{rk45_step, rk4_step};

/// A first-order autonomous or non-autonomous vector field `dx/dt = f(t, x)`.
pub trait VectorField {
    fn dim(&self) -> usize;

    /// Writes `f(t, x)` into `dx`. Both slices have length [`Self::dim`].
    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]);

    /// The builtin system behind this field, if any.
    fn spec(&self) -> Option<&SystemSpec> {
        None
    }
}

impl<F: VectorField + ?Sized> VectorField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (**self).eval(t, x, dx)
    }

    fn spec(&self) -> Option<&SystemSpec> {
        (**self).spec()
    }
}

/// Adapts a closure `|t, x, dx|` into a [`VectorField`].
#[derive(Clone, Copy)]
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.f)(t, x, dx)
    }
}

/// Model time plus state vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct State {
    pub t: f64,
    pub x: Vec<f64>,
}

impl State {
    pub fn new(t: f64, x: impl Into<Vec<f64>>) -> Self {
        Self { t, x: x.into() }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|v| v.is_finite())
    }
}

/// One attempted integration step.
///
/// `stage_slopes` holds the RK stage derivatives. The first entry is always
/// the slope at `start` and the last entry the slope at `end`, which is what
/// [`dense_interpolate`] relies on.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub start: State,
    pub end: State,
    pub h: f64,
    pub error_estimate: f64,
    pub accepted: bool,
    pub stage_slopes: Vec<Vec<f64>>,
}

impl StepRecord {
    pub(crate) fn compact(mut self) -> Self {
        let n = self.stage_slopes.len();
        if n > 2 {
            let last = self.stage_slopes.swap_remove(n - 1);
            self.stage_slopes.truncate(1);
            self.stage_slopes.push(last);
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FixedRk4,
    AdaptiveRk45,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FixedRk4 => "fixed-rk4",
            Method::AdaptiveRk45 => "adaptive-rk45",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed-rk4" => Ok(Method::FixedRk4),
            "adaptive-rk45" => Ok(Method::AdaptiveRk45),
            other => Err(format!(
                "unknown method `{other}` (expected fixed-rk4 or adaptive-rk45)"
            )),
        }
    }
}

/// Integrator settings. For [`Method::FixedRk4`] the step is `h_init` and the
/// tolerances are ignored.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Output points per accepted step; `refine - 1` of them are interpolated.
    pub refine: usize,
    pub t_final: f64,
    /// Cap on attempted (accepted plus rejected) steps.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::AdaptiveRk45,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 0.1,
            rtol: 1e-6,
            atol: 1e-9,
            refine: 4,
            t_final: 10.0,
            max_steps: 5_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn fixed_rk4(h: f64, t_final: f64) -> Self {
        Self {
            method: Method::FixedRk4,
            h_init: h,
            h_min: h,
            h_max: h,
            refine: 1,
            t_final,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: &str| {
            Err(Error::InvalidParameter {
                name: name.to_string(),
                reason: reason.to_string(),
            })
        };
        let all_finite = [
            self.h_init,
            self.h_min,
            self.h_max,
            self.rtol,
            self.atol,
            self.t_final,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return bad("integrator", "all numeric settings must be finite");
        }
        if !(self.h_min > 0.0) {
            return bad("h_min", "must be > 0");
        }
        if !(self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return bad("h_init", "must satisfy h_min <= h_init <= h_max");
        }
        if !(self.rtol > 0.0) {
            return bad("rtol", "must be > 0");
        }
        if !(self.atol > 0.0) {
            return bad("atol", "must be > 0");
        }
        if self.refine < 1 {
            return bad("refine", "must be >= 1");
        }
        if self.max_steps < 1 {
            return bad("max_steps", "must be >= 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Accepted steps of one run together with its dense output.
///
/// Stored step records keep only the first and last stage slopes; the full
/// stage list is handed to the observer during integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub system: Option<SystemSpec>,
    pub steps: Vec<StepRecord>,
    pub refined_points: Vec<State>,
    pub stats: Stats,
}

impl Trajectory {
    pub fn initial(&self) -> &State {
        &self.refined_points[0]
    }

    pub fn last(&self) -> &State {
        self.refined_points.last().expect("trajectory is never empty")
    }

    pub fn dim(&self) -> usize {
        self.initial().dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        IntegratorConfig::default().validate().unwrap();
        IntegratorConfig::fixed_rk4(0.01, 1.0).validate().unwrap();
    }

    #[test]
    fn config_invariants() {
        let mut cfg = IntegratorConfig::default();
        cfg.h_init = 1.0;
        assert!(cfg.validate().is_err());

        let mut cfg = IntegratorConfig::default();
        cfg.refine = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = IntegratorConfig::default();
        cfg.rtol = 0.0;
        assert!(cfg.validate().is_err());

        let mut cfg = IntegratorConfig::default();
        cfg.h_min = 0.0;
        assert!(cfg.validate().is_err());

        let mut cfg = IntegratorConfig::default();
        cfg.t_final = f64::NAN;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn compact_keeps_endpoint_slopes() {
        let rec = StepRecord {
            start: State::new(0.0, vec![0.0]),
            end: State::new(1.0, vec![1.0]),
            h: 1.0,
            error_estimate: 0.0,
            accepted: true,
            stage_slopes: (0..7).map(|i| vec![i as f64]).collect(),
        };
        let c = rec.compact();
        assert_eq!(c.stage_slopes, vec![vec![0.0], vec![6.0]]);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::FixedRk4, Method::AdaptiveRk45] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("euler".parse::<Method>().is_err());
    }
}
