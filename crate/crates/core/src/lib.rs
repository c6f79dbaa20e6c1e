//! Simulation toolkit for slow-fast and chaotic dynamical systems.
//!
//! The crate is split into four layers:
//!
//! * [`ode`] - fixed-step RK4 and an embedded Dormand-Prince 5(4) pair with
//!   per-step observers and cubic Hermite dense output (`refine`).
//! * [`systems`] - the Van der Pol, Chua and Lorenz vector fields with
//!   analytic Jacobians.
//! * [`analysis`] - equilibria, small-matrix eigenvalues, slow/fast
//!   segmentation, Poincare-section period estimates and the largest
//!   Lyapunov exponent.
//! * [`render`] - projections, animated frame sequences (PPM, GIF) and
//!   CSV / NDJSON state streams.

pub mod analysis;
pub mod error;
pub mod ode;
pub mod render;
pub mod systems;

pub use error::{Error, Result};
pub use ode::{
    dense_interpolate, integrate, rk45_step, rk4_step, FnField, IntegratorConfig, Method, State,
    StepRecord, Stepper, Trajectory, VectorField,
};
pub use systems::{SystemId, SystemSpec};
