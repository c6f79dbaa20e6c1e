use serde::Serialize;

use super::projection::{Pixel, Projection};
use super::raster::{Canvas, Rgb};
use crate::error::{Error, Result};
use crate::ode::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarkerStyle {
    pub radius: u32,
    pub color: Rgb,
}

impl Default for MarkerStyle {
    fn default() -> Self {
        Self {
            radius: 3,
            color: Rgb::GREEN,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Style {
    pub marker: MarkerStyle,
    /// Draw only this many trailing refined points; `None` draws everything
    /// up to the marker.
    pub trail_length: Option<usize>,
    pub background: Rgb,
    pub line: Rgb,
    pub border: Option<Rgb>,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            marker: MarkerStyle::default(),
            trail_length: None,
            background: Rgb::WHITE,
            line: Rgb::BLACK,
            border: Some(Rgb::GRAY),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameSet {
    pub frames: Vec<Canvas>,
    pub frame_times: Vec<f64>,
    /// Refined-point index under the marker in each frame.
    pub marker_indices: Vec<usize>,
    pub marker_style: MarkerStyle,
    pub trail_length: Option<usize>,
}

impl FrameSet {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Number of frames produced for `points` refined points.
pub fn frame_count(points: usize, every: usize) -> usize {
    (points - 1) / every + 1
}

/// Renders one frame per `every` refined points. Frame `m` has its marker on
/// refined point `m * every`.
pub fn render_frames(
    traj: &Trajectory,
    projection: &Projection,
    every: usize,
    style: &Style,
) -> Result<FrameSet> {
    if every == 0 {
        return Err(Error::domain("`every` must be at least 1"));
    }
    let points = &traj.refined_points;
    if points.is_empty() {
        return Err(Error::domain("cannot render an empty trajectory"));
    }
    projection.validate()?;
    let pixels: Vec<Pixel> = points
        .iter()
        .map(|p| projection.project(&p.x))
        .collect::<Result<_>>()?;
    let xy = |k: usize| (pixels[k].x, pixels[k].y);

    let n_frames = frame_count(points.len(), every);
    let blank = Canvas::new(projection.width, projection.height, style.background);
    let mut base = blank.clone();
    let mut drawn_upto = 0usize;

    let mut frames = Vec::with_capacity(n_frames);
    let mut frame_times = Vec::with_capacity(n_frames);
    let mut marker_indices = Vec::with_capacity(n_frames);
    for m in 0..n_frames {
        let idx = m * every;
        let mut frame = match style.trail_length {
            None => {
                for k in drawn_upto + 1..=idx {
                    base.draw_line(xy(k - 1), xy(k), style.line);
                }
                drawn_upto = idx;
                base.clone()
            }
            Some(trail) => {
                let mut c = blank.clone();
                let first = (idx + 1).saturating_sub(trail);
                for k in first + 1..=idx {
                    c.draw_line(xy(k - 1), xy(k), style.line);
                }
                c
            }
        };
        if let Some(border) = style.border {
            frame.draw_border(border);
        }
        frame.draw_disc(pixels[idx].x, pixels[idx].y, style.marker.radius, style.marker.color);
        frames.push(frame);
        frame_times.push(points[idx].t);
        marker_indices.push(idx);
    }
    Ok(FrameSet {
        frames,
        frame_times,
        marker_indices,
        marker_style: style.marker,
        trail_length: style.trail_length,
    })
}
