use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{State, Trajectory, VectorField};

/// Runs shorter than this many points are absorbed into a neighbour.
pub const MIN_SEGMENT_POINTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedLabel {
    Slow,
    Fast,
}

/// Inclusive range of refined-point indices sharing one label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub label: SpeedLabel,
    pub mean_speed: f64,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlowFastSegmentation {
    pub segments: Vec<Segment>,
    pub threshold: f64,
    #[serde(skip)]
    pub speeds: Vec<f64>,
}

impl SlowFastSegmentation {
    pub fn count(&self, label: SpeedLabel) -> usize {
        self.segments.iter().filter(|s| s.label == label).count()
    }

    /// Per-point labels after hysteresis.
    pub fn labels(&self) -> Vec<SpeedLabel> {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat(s.label).take(s.len()))
            .collect()
    }

    /// Mean of per-point speeds over all points carrying `label`.
    pub fn mean_speed(&self, label: SpeedLabel) -> Option<f64> {
        let (sum, n) = self
            .segments
            .iter()
            .filter(|s| s.label == label)
            .flat_map(|s| &self.speeds[s.start..=s.end])
            .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }
}

/// Euclidean norm of the vector field at each point.
pub fn phase_speeds<F: VectorField + ?Sized>(field: &F, points: &[State]) -> Vec<f64> {
    let mut dx = vec![0.0; field.dim()];
    points
        .iter()
        .map(|p| {
            field.eval(p.t, &p.x, &mut dx);
            dx.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .collect()
}

/// Splits the refined points of `traj` into slow and fast runs by phase
/// speed.
///
/// The default threshold is the geometric mean of the smallest and largest
/// speed seen. Runs shorter than [`MIN_SEGMENT_POINTS`] are merged into the
/// preceding run (or the following one at the very start).
pub fn segment_slow_fast<F: VectorField + ?Sized>(
    field: &F,
    traj: &Trajectory,
    threshold: Option<f64>,
) -> Result<SlowFastSegmentation> {
    let points = &traj.refined_points;
    if points.len() < 2 {
        return Err(Error::domain(
            "segmentation needs at least two refined points",
        ));
    }
    let speeds = phase_speeds(field, points);
    let threshold = match threshold {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(t) => return Err(Error::domain(format!("invalid speed threshold {t}"))),
        None => {
            let (lo, hi) = speeds
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            (lo * hi).sqrt()
        }
    };
    let label_of = |v: f64| {
        if v > threshold {
            SpeedLabel::Fast
        } else {
            SpeedLabel::Slow
        }
    };

    // Raw runs as (label, start, end).
    let mut runs: Vec<(SpeedLabel, usize, usize)> = Vec::new();
    for (i, &v) in speeds.iter().enumerate() {
        let l = label_of(v);
        match runs.last_mut() {
            Some(last) if last.0 == l => last.2 = i,
            _ => runs.push((l, i, i)),
        }
    }

    let mut merged: Vec<(SpeedLabel, usize, usize)> = Vec::with_capacity(runs.len());
    for run in runs {
        if let Some(last) = merged.last_mut() {
            if run.0 == last.0 || run.2 - run.1 + 1 < MIN_SEGMENT_POINTS {
                last.2 = run.2;
                continue;
            }
        }
        merged.push(run);
    }
    if merged.len() > 1 && merged[0].2 - merged[0].1 + 1 < MIN_SEGMENT_POINTS {
        let first = merged.remove(0);
        merged[0].1 = first.1;
    }

    let segments = merged
        .into_iter()
        .map(|(label, start, end)| Segment {
            start,
            end,
            label,
            mean_speed: speeds[start..=end].iter().sum::<f64>() / (end - start + 1) as f64,
        })
        .collect();
    Ok(SlowFastSegmentation {
        segments,
        threshold,
        speeds,
    })
}
