use std::ops::ControlFlow;

use super::dense::dense_interpolate;
use super::rk::{dopri_from, eval_checked, rk4_from};
use super::{IntegratorConfig, Method, State, Stats, StepRecord, Trajectory, VectorField};
use crate::error::{Error, Result};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Step-by-step driver that owns the current state, the FSAL slope and the
/// step-size controller.
///
/// [`integrate`] is built on top of it; callers that need to modify the state
/// between steps (e.g. renormalisation in Lyapunov estimates) use it
/// directly.
pub struct Stepper<F> {
    field: F,
    cfg: IntegratorConfig,
    state: State,
    slope: Vec<f64>,
    h: f64,
    attempts: usize,
    stats: Stats,
}

impl<F: VectorField> Stepper<F> {
    pub fn new(field: F, x0: State, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        if x0.dim() != field.dim() {
            return Err(Error::domain(format!(
                "initial state has dimension {}, system expects {}",
                x0.dim(),
                field.dim()
            )));
        }
        if !x0.is_finite() {
            return Err(Error::domain("initial state must be finite"));
        }
        let slope = eval_checked(&field, x0.t, &x0.x, 1)?;
        Ok(Self {
            field,
            h: cfg.h_init,
            cfg: cfg.clone(),
            state: x0,
            slope,
            attempts: 0,
            stats: Stats {
                rhs_evals: 1,
                ..Stats::default()
            },
        })
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    /// Step size the controller will try next.
    pub fn next_step_size(&self) -> f64 {
        self.h
    }

    /// Replaces the state vector at the current time.
    pub fn reset_state(&mut self, x: Vec<f64>) -> Result<()> {
        if x.len() != self.state.dim() {
            return Err(Error::domain("reset_state: dimension mismatch"));
        }
        self.slope = eval_checked(&self.field, self.state.t, &x, 1)?;
        self.stats.rhs_evals += 1;
        self.state.x = x;
        Ok(())
    }

    /// Takes one accepted step that does not go past `t_stop`, retrying
    /// rejected attempts internally. A step that would overshoot is
    /// truncated to end exactly at `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<StepRecord> {
        let remaining = t_stop - self.state.t;
        if !(remaining > 0.0) {
            return Err(Error::domain(format!(
                "cannot step from t = {} to t = {t_stop}",
                self.state.t
            )));
        }
        loop {
            if self.attempts >= self.cfg.max_steps {
                return Err(Error::StepBudgetExhausted {
                    max_steps: self.cfg.max_steps,
                    t: self.state.t,
                });
            }
            self.attempts += 1;
            let truncated = self.h >= remaining;
            let h = if truncated { remaining } else { self.h };

            let mut rec = match self.cfg.method {
                Method::FixedRk4 => {
                    let (end, mut stages) =
                        rk4_from(&self.field, &self.state, h, self.slope.clone())?;
                    let end_slope = eval_checked(&self.field, end.t, &end.x, 5)?;
                    self.stats.rhs_evals += 4;
                    stages.push(end_slope);
                    StepRecord {
                        start: self.state.clone(),
                        end,
                        h,
                        error_estimate: 0.0,
                        accepted: true,
                        stage_slopes: stages,
                    }
                }
                Method::AdaptiveRk45 => {
                    let rec = dopri_from(
                        &self.field,
                        &self.state,
                        h,
                        self.slope.clone(),
                        self.cfg.rtol,
                        self.cfg.atol,
                    )?;
                    self.stats.rhs_evals += 6;
                    rec
                }
            };

            if !rec.accepted {
                self.stats.rejected += 1;
                if h <= self.cfg.h_min {
                    return Err(Error::StepSizeUnderflow {
                        t: self.state.t,
                        h,
                    });
                }
                self.h = self.clamp(h * step_factor(rec.error_estimate));
                continue;
            }

            if truncated {
                rec.end.t = t_stop;
            }
            if self.cfg.method == Method::AdaptiveRk45 {
                let proposal = self.clamp(h * step_factor(rec.error_estimate));
                // A truncated step says little about the next full-size step:
                // only let it shrink the controller.
                self.h = if truncated { self.h.min(proposal) } else { proposal };
            }
            self.stats.accepted += 1;
            self.slope = rec.stage_slopes.last().expect("stages present").clone();
            self.state = rec.end.clone();
            return Ok(rec);
        }
    }

    fn clamp(&self, h: f64) -> f64 {
        h.clamp(self.cfg.h_min, self.cfg.h_max)
    }
}

fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        MAX_FACTOR
    } else {
        (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
    }
}

/// Per-step observer; returning `ControlFlow::Break` stops the run after the
/// step it was called with.
pub type Observer<'a> = &'a mut dyn FnMut(&StepRecord) -> ControlFlow<()>;

/// Integrates from `x0` to `cfg.t_final`.
///
/// The observer sees every accepted step exactly once (with all stage
/// slopes) and never a rejected one. After each accepted step `refine - 1`
/// interpolated points and the step end are appended to `refined_points`.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    x0: &State,
    cfg: &IntegratorConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<Trajectory> {
    if cfg.t_final < x0.t {
        return Err(Error::domain(format!(
            "t_final = {} precedes the initial time {}",
            cfg.t_final, x0.t
        )));
    }
    let mut stepper = Stepper::new(field, x0.clone(), cfg)?;
    let mut steps = Vec::new();
    let mut refined = vec![x0.clone()];

    while stepper.state().t < cfg.t_final {
        let rec = stepper.step(cfg.t_final)?;
        let flow = match observer.as_mut() {
            Some(obs) => obs(&rec),
            None => ControlFlow::Continue(()),
        };
        for j in 1..cfg.refine {
            refined.push(dense_interpolate(&rec, j as f64 / cfg.refine as f64)?);
        }
        refined.push(rec.end.clone());
        steps.push(rec.compact());
        if flow.is_break() {
            break;
        }
    }

    Ok(Trajectory {
        system: field.spec().cloned(),
        steps,
        refined_points: refined,
        stats: stepper.stats(),
    })
}
