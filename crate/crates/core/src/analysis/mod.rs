//! Diagnostics for slow-fast and chaotic behaviour.

mod eigen;
mod equilibria;
mod lyapunov;
mod period;
mod segment;

pub use eigen::eigenvalues_small;
pub use equilibria::{default_seeds, find_equilibria, seed_grid, Equilibrium, EquilibriumSearch, Stability};
pub use lyapunov::{largest_lyapunov, LYAPUNOV_OFFSET};
pub use period::{estimate_period, Direction, LimitCycleEstimate, Section, DEFAULT_PERIOD_WINDOW};
pub use segment::{phase_speeds, segment_slow_fast, Segment, SlowFastSegmentation, SpeedLabel, MIN_SEGMENT_POINTS};
