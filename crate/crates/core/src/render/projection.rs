use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_CANVAS_SIDE: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum ProjectionMode {
    /// Components `i` (horizontal) and `j` (vertical).
    Plane2d { i: usize, j: usize },
    /// Orthographic view of a 3-D state. At zero azimuth and elevation the
    /// camera looks down the +x2 axis, so (a, b, c) projects to (a, c).
    /// Azimuth rotates about the x3 axis, elevation tilts the camera upward.
    Ortho3d { azimuth_deg: f64, elevation_deg: f64 },
}

impl ProjectionMode {
    pub fn required_dim(&self) -> usize {
        match *self {
            ProjectionMode::Plane2d { i, j } => i.max(j) + 1,
            ProjectionMode::Ortho3d { .. } => 3,
        }
    }

    /// Maps a state onto the projection plane (before windowing).
    pub fn apply(&self, x: &[f64]) -> Result<(f64, f64)> {
        match *self {
            ProjectionMode::Plane2d { i, j } => {
                if x.len() <= i.max(j) {
                    return Err(Error::domain(format!(
                        "plane2d({i},{j}) needs dimension > {}, got {}",
                        i.max(j),
                        x.len()
                    )));
                }
                Ok((x[i], x[j]))
            }
            ProjectionMode::Ortho3d {
                azimuth_deg,
                elevation_deg,
            } => {
                if x.len() != 3 {
                    return Err(Error::domain(format!(
                        "ortho3d needs a 3-D state, got dimension {}",
                        x.len()
                    )));
                }
                let (sa, ca) = azimuth_deg.to_radians().sin_cos();
                let (se, ce) = elevation_deg.to_radians().sin_cos();
                let u = ca * x[0] + sa * x[1];
                let depth = -sa * x[0] + ca * x[1];
                let v = ce * x[2] - se * depth;
                Ok((u, v))
            }
        }
    }
}

/// Axis-aligned bounds in projected coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_max > self.x_min
            && self.y_max > self.y_min
    }

    /// Bounding box of `points` grown by `margin` (a fraction of each side).
    /// Degenerate extents are widened to a unit span.
    pub fn fit(points: impl IntoIterator<Item = (f64, f64)>, margin: f64) -> Option<Window> {
        let mut it = points.into_iter().filter(|(u, v)| u.is_finite() && v.is_finite());
        let (u0, v0) = it.next()?;
        let (mut x_min, mut x_max, mut y_min, mut y_max) = (u0, u0, v0, v0);
        for (u, v) in it {
            x_min = x_min.min(u);
            x_max = x_max.max(u);
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
        let pad = |lo: f64, hi: f64| {
            let span = hi - lo;
            if span > 0.0 {
                (lo - margin * span, hi + margin * span)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x_min, x_max) = pad(x_min, x_max);
        let (y_min, y_max) = pad(y_min, y_max);
        Some(Window::new(x_min, x_max, y_min, y_max))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Projection {
    pub mode: ProjectionMode,
    pub window: Window,
    pub width: u32,
    pub height: u32,
}

/// Continuous pixel coordinates; (0, 0) is the top-left corner of the
/// canvas and (width, height) the bottom-right.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pixel {
    pub x: f64,
    pub y: f64,
    pub on_canvas: bool,
}

impl Projection {
    pub fn new(mode: ProjectionMode, window: Window, width: u32, height: u32) -> Result<Self> {
        let p = Self {
            mode,
            window,
            width,
            height,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if let ProjectionMode::Plane2d { i, j } = self.mode {
            if i == j {
                return Err(Error::domain("plane2d axes must differ"));
            }
        }
        if let ProjectionMode::Ortho3d {
            azimuth_deg,
            elevation_deg,
        } = self.mode
        {
            if !azimuth_deg.is_finite() || !elevation_deg.is_finite() {
                return Err(Error::domain("ortho3d angles must be finite"));
            }
        }
        if !self.window.is_valid() {
            return Err(Error::domain(format!("degenerate window {:?}", self.window)));
        }
        if self.width < MIN_CANVAS_SIDE || self.height < MIN_CANVAS_SIDE {
            return Err(Error::domain(format!(
                "canvas must be at least {MIN_CANVAS_SIDE}x{MIN_CANVAS_SIDE}, got {}x{}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn project(&self, x: &[f64]) -> Result<Pixel> {
        let (u, v) = self.mode.apply(x)?;
        let w = &self.window;
        let px = (u - w.x_min) / (w.x_max - w.x_min) * self.width as f64;
        let py = (w.y_max - v) / (w.y_max - w.y_min) * self.height as f64;
        let on_canvas = (0.0..=self.width as f64).contains(&px)
            && (0.0..=self.height as f64).contains(&py);
        Ok(Pixel {
            x: px,
            y: py,
            on_canvas,
        })
    }
}

pub fn project(p: &Projection, x: &[f64]) -> Result<Pixel> {
    p.project(x)
}
