use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::Trajectory;
use crate::systems::SystemSpec;

/// Number of trailing crossing gaps averaged into the period.
pub const DEFAULT_PERIOD_WINDOW: usize = 5;
const CONVERGENCE_RATIO: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
    Either,
}

/// The hyperplane `x[index] = value`, crossed in `direction`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Section {
    pub index: usize,
    pub value: f64,
    pub direction: Direction,
}

impl Section {
    pub fn new(index: usize, value: f64, direction: Direction) -> Self {
        Self {
            index,
            value,
            direction,
        }
    }

    /// x2 = 0 upward for Van der Pol and Chua; x3 = r - 1 (the height of the
    /// wing equilibria) upward for Lorenz.
    pub fn default_for(spec: &SystemSpec) -> Self {
        match spec {
            SystemSpec::VanDerPol(_) | SystemSpec::Chua(_) => {
                Section::new(1, 0.0, Direction::Increasing)
            }
            SystemSpec::Lorenz(p) => Section::new(2, p.r - 1.0, Direction::Increasing),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitCycleEstimate {
    /// Mean of the last crossing gaps; `None` with fewer than three crossings.
    pub period: Option<f64>,
    pub crossings: Vec<f64>,
    /// Max |x1| between the last two crossings.
    pub amplitude: Option<f64>,
    pub converged: bool,
}

/// Detects section crossings between consecutive refined points (located by
/// linear interpolation) and averages the last `window` gaps.
///
/// Convergence means the population standard deviation of those gaps is
/// below 1e-3 of their mean.
pub fn estimate_period(
    traj: &Trajectory,
    section: &Section,
    window: usize,
) -> Result<LimitCycleEstimate> {
    if section.index >= traj.dim() {
        return Err(Error::domain(format!(
            "section index {} out of range for dimension {}",
            section.index,
            traj.dim()
        )));
    }
    if window == 0 {
        return Err(Error::domain("period window must be at least 1"));
    }
    let c = section.value;
    let mut crossings: Vec<f64> = Vec::new();
    for pair in traj.refined_points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let da = a.x[section.index] - c;
        let db = b.x[section.index] - c;
        let hit = match section.direction {
            Direction::Increasing => da < 0.0 && db >= 0.0,
            Direction::Decreasing => da > 0.0 && db <= 0.0,
            Direction::Either => (da < 0.0 && db >= 0.0) || (da > 0.0 && db <= 0.0),
        };
        if !hit {
            continue;
        }
        let t = a.t + (b.t - a.t) * da / (da - db);
        if crossings.last().is_none_or(|&prev| t > prev) {
            crossings.push(t);
        }
    }

    if crossings.len() < 3 {
        return Ok(LimitCycleEstimate {
            period: None,
            crossings,
            amplitude: None,
            converged: false,
        });
    }

    let gaps: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &gaps[gaps.len().saturating_sub(window)..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let var = tail.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / tail.len() as f64;
    let converged = var.sqrt() < CONVERGENCE_RATIO * mean;

    let (t0, t1) = (crossings[crossings.len() - 2], crossings[crossings.len() - 1]);
    let amplitude = traj
        .refined_points
        .iter()
        .filter(|p| p.t >= t0 && p.t <= t1)
        .map(|p| p.x[0].abs())
        .fold(0.0f64, f64::max);

    Ok(LimitCycleEstimate {
        period: Some(mean),
        crossings,
        amplitude: Some(amplitude),
        converged,
    })
}
