use std::collections::BTreeMap;

use serde::Serialize;
use slowfast_core::analysis::{EquilibriumSearch, LimitCycleEstimate, Section, Segment};
use slowfast_core::ode::Stats;
use slowfast_core::render::Window;
use slowfast_core::{IntegratorConfig, State};

/// Contents of `report.json`. Holds no paths or timings, so identical runs
/// produce identical reports.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub system: &'static str,
    pub params: BTreeMap<&'static str, f64>,
    pub initial_state: Vec<f64>,
    pub integrator: IntegratorConfig,
    pub stats: Stats,
    pub refined_points: usize,
    pub final_state: State,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub animation: Option<AnimationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<EquilibriumSearch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segments: Option<SegmentReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<PeriodReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lyapunov: Option<LyapunovReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnimationReport {
    pub frames: usize,
    pub every: usize,
    pub window: Window,
}

#[derive(Clone, Debug, Serialize)]
pub struct SegmentReport {
    pub threshold: f64,
    pub slow_segments: usize,
    pub fast_segments: usize,
    pub mean_slow_speed: Option<f64>,
    pub mean_fast_speed: Option<f64>,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodReport {
    pub section: Section,
    #[serde(flatten)]
    pub estimate: LimitCycleEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct LyapunovReport {
    pub exponent: f64,
    pub horizon: f64,
    pub renorm_interval: f64,
}
