//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Requests arrive as JSON strings. The `compute_*` functions do the work and
//! are plain Rust so they can be tested natively; the `#[wasm_bindgen]`
//! wrappers only translate errors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use slowfast_core::analysis::{
    default_seeds, estimate_period, find_equilibria, largest_lyapunov, segment_slow_fast, Section,
    SpeedLabel, Stability, DEFAULT_PERIOD_WINDOW,
};
use slowfast_core::render::{ProjectionMode, Window};
use slowfast_core::systems::SystemId;
use slowfast_core::{integrate, IntegratorConfig, State, SystemSpec, Trajectory};
use wasm_bindgen::prelude::*;

/// Upper bound on points shipped to the page per portrait.
pub const DEFAULT_MAX_POINTS: usize = 20_000;

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Request {
    pub system: String,
    pub params: BTreeMap<String, f64>,
    pub ic: Option<Vec<f64>>,
    pub t_final: Option<f64>,
    pub rtol: f64,
    pub refine: usize,
    pub azimuth: f64,
    pub elevation: f64,
    pub max_points: usize,
    pub lyapunov_horizon: f64,
    pub renorm_interval: f64,
}

impl Default for Request {
    fn default() -> Self {
        Self {
            system: "vanderpol".into(),
            params: BTreeMap::new(),
            ic: None,
            t_final: None,
            rtol: 1e-6,
            refine: 4,
            azimuth: 0.0,
            elevation: 0.0,
            max_points: DEFAULT_MAX_POINTS,
            lyapunov_horizon: 200.0,
            renorm_interval: 1.0,
        }
    }
}

impl Request {
    pub fn parse(json: &str) -> Result<Self, String> {
        serde_json::from_str(json).map_err(|e| format!("bad request: {e}"))
    }

    fn spec(&self) -> Result<SystemSpec, String> {
        let id: SystemId = self.system.parse().map_err(|e: slowfast_core::Error| e.to_string())?;
        let mut spec = SystemSpec::preset(id);
        for (k, v) in &self.params {
            spec.set_param(k, *v).map_err(|e| e.to_string())?;
        }
        spec.validate_params().map_err(|e| e.to_string())?;
        Ok(spec)
    }

    fn initial_state(&self, id: SystemId) -> Result<State, String> {
        let x = self.ic.clone().unwrap_or_else(|| id.preset_initial_state());
        if x.len() != id.dimension() {
            return Err(format!("{id} needs {} initial values", id.dimension()));
        }
        Ok(State::new(0.0, x))
    }

    fn integrator(&self, id: SystemId) -> Result<IntegratorConfig, String> {
        let cfg = IntegratorConfig {
            rtol: self.rtol,
            atol: self.rtol * 1e-3,
            refine: self.refine,
            t_final: self.t_final.unwrap_or_else(|| id.preset_t_final()),
            ..IntegratorConfig::default()
        };
        cfg.validate().map_err(|e| e.to_string())?;
        if !(cfg.t_final > 0.0) {
            return Err("t_final must be positive".into());
        }
        Ok(cfg)
    }

    fn projection(&self, id: SystemId) -> ProjectionMode {
        match id {
            SystemId::VanDerPol => ProjectionMode::Plane2d { i: 0, j: 1 },
            _ => ProjectionMode::Ortho3d {
                azimuth_deg: self.azimuth,
                elevation_deg: self.elevation,
            },
        }
    }

    fn run(&self) -> Result<(SystemSpec, State, Trajectory), String> {
        let spec = self.spec()?;
        let x0 = self.initial_state(spec.id())?;
        let cfg = self.integrator(spec.id())?;
        let traj = integrate(&spec, &x0, &cfg, None).map_err(|e| e.to_string())?;
        Ok((spec, x0, traj))
    }
}

/// Projected trajectory plus speed labels, thinned to at most
/// `max_points` points.
#[derive(Clone, Debug, Serialize)]
pub struct PortraitData {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    pub fast: Vec<u8>,
    pub window: Window,
    pub threshold: f64,
    pub slow_segments: usize,
    pub fast_segments: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub total_points: usize,
}

pub fn compute_portrait(req: &Request) -> Result<PortraitData, String> {
    let (spec, _, traj) = req.run()?;
    let mode = req.projection(spec.id());
    let seg = segment_slow_fast(&spec, &traj, None).map_err(|e| e.to_string())?;
    let labels = seg.labels();
    let n = traj.refined_points.len();
    let stride = n.div_ceil(req.max_points.max(2)).max(1);
    let mut keep: Vec<usize> = (0..n).step_by(stride).collect();
    if keep.last() != Some(&(n - 1)) {
        keep.push(n - 1);
    }

    let mut out = PortraitData {
        u: Vec::with_capacity(keep.len()),
        v: Vec::with_capacity(keep.len()),
        t: Vec::with_capacity(keep.len()),
        fast: Vec::with_capacity(keep.len()),
        window: Window::new(-1.0, 1.0, -1.0, 1.0),
        threshold: seg.threshold,
        slow_segments: seg.count(SpeedLabel::Slow),
        fast_segments: seg.count(SpeedLabel::Fast),
        accepted_steps: traj.stats.accepted,
        rejected_steps: traj.stats.rejected,
        total_points: n,
    };
    for &k in &keep {
        let p = &traj.refined_points[k];
        let (u, v) = mode.apply(&p.x).map_err(|e| e.to_string())?;
        out.u.push(u);
        out.v.push(v);
        out.t.push(p.t);
        out.fast.push((labels[k] == SpeedLabel::Fast) as u8);
    }
    out.window = Window::fit(out.u.iter().copied().zip(out.v.iter().copied()), 0.1)
        .ok_or("trajectory has no finite points")?;
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumView {
    pub x: Vec<f64>,
    pub eigenvalues: Vec<[f64; 2]>,
    pub classification: Stability,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisData {
    pub system: &'static str,
    pub params: BTreeMap<&'static str, f64>,
    pub equilibria: Vec<EquilibriumView>,
    pub period: Option<f64>,
    pub period_converged: bool,
    pub amplitude: Option<f64>,
    pub lyapunov: Option<f64>,
}

/// Equilibria, Poincare-section period and, when `lyapunov_horizon > 0`, the
/// largest Lyapunov exponent.
pub fn compute_analysis(req: &Request) -> Result<AnalysisData, String> {
    let (spec, x0, traj) = req.run()?;
    let eq = find_equilibria(&spec, &default_seeds(&spec)).map_err(|e| e.to_string())?;
    let est = estimate_period(&traj, &Section::default_for(&spec), DEFAULT_PERIOD_WINDOW)
        .map_err(|e| e.to_string())?;
    let lyapunov = if req.lyapunov_horizon > 0.0 {
        let cfg = req.integrator(spec.id())?;
        Some(
            largest_lyapunov(&spec, &x0, &cfg, req.lyapunov_horizon, req.renorm_interval)
                .map_err(|e| e.to_string())?,
        )
    } else {
        None
    };
    Ok(AnalysisData {
        system: spec.id().name(),
        params: spec.params().into_iter().collect(),
        equilibria: eq
            .equilibria
            .into_iter()
            .map(|e| EquilibriumView {
                x: e.x,
                eigenvalues: e.eigenvalues.iter().map(|c| [c.re, c.im]).collect(),
                classification: e.classification,
            })
            .collect(),
        period: est.period,
        period_converged: est.converged,
        amplitude: est.amplitude,
        lyapunov,
    })
}

#[derive(Serialize)]
struct PresetView {
    name: &'static str,
    params: Vec<(&'static str, f64)>,
    ic: Vec<f64>,
    t_final: f64,
}

pub fn preset_table() -> String {
    let table: Vec<PresetView> = SystemId::ALL
        .into_iter()
        .map(|id| PresetView {
            name: id.name(),
            params: SystemSpec::preset(id).params(),
            ic: id.preset_initial_state(),
            t_final: id.preset_t_final(),
        })
        .collect();
    serde_json::to_string(&table).expect("preset table serializes")
}

#[wasm_bindgen]
pub struct Portrait {
    inner: PortraitData,
}

#[wasm_bindgen]
impl Portrait {
    pub fn len(&self) -> usize {
        self.inner.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.u.is_empty()
    }

    pub fn u(&self) -> Vec<f64> {
        self.inner.u.clone()
    }

    pub fn v(&self) -> Vec<f64> {
        self.inner.v.clone()
    }

    pub fn t(&self) -> Vec<f64> {
        self.inner.t.clone()
    }

    /// 1 where the point is on a fast segment.
    pub fn fast(&self) -> Vec<u8> {
        self.inner.fast.clone()
    }

    /// [x_min, x_max, y_min, y_max] of the fitted view.
    pub fn window(&self) -> Vec<f64> {
        let w = &self.inner.window;
        vec![w.x_min, w.x_max, w.y_min, w.y_max]
    }

    /// Everything except the point arrays, as JSON.
    pub fn summary(&self) -> String {
        let d = &self.inner;
        serde_json::json!({
            "threshold": d.threshold,
            "slow_segments": d.slow_segments,
            "fast_segments": d.fast_segments,
            "accepted_steps": d.accepted_steps,
            "rejected_steps": d.rejected_steps,
            "total_points": d.total_points,
            "shown_points": d.u.len(),
        })
        .to_string()
    }
}

#[wasm_bindgen]
pub fn portrait(request: &str) -> Result<Portrait, JsError> {
    Request::parse(request)
        .and_then(|r| compute_portrait(&r))
        .map(|inner| Portrait { inner })
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyze(request: &str) -> Result<String, JsError> {
    Request::parse(request)
        .and_then(|r| compute_analysis(&r))
        .map(|a| serde_json::to_string(&a).expect("analysis serializes"))
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn presets() -> String {
    preset_table()
}
