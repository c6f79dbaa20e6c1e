//! Animated phase portraits and state streams.
//!
//! Frames are plain RGB rasters; a frame shows the trajectory polyline up to
//! the current refined point plus a marker on that point.

mod frames;
mod gif;
mod ppm;
mod projection;
mod raster;
mod series;

pub use self::gif::{encode_gif, write_gif, UniformPalette, MAX_GIF_SIDE};
pub use frames::{frame_count, render_frames, FrameSet, MarkerStyle, Style};
pub use ppm::{encode_ppm, write_ppm_sequence};
pub use projection::{project, Pixel, Projection, ProjectionMode, Window};
pub use raster::{Canvas, Rgb};
pub use series::{emit_ndjson, emit_timeseries_csv, write_ndjson, write_timeseries_csv, NdjsonRecord};
