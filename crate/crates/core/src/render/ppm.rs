use std::fs;
use std::path::{Path, PathBuf};

use super::frames::FrameSet;
use super::raster::Canvas;
use crate::error::{Error, Result};

/// Binary PPM (P6, maxval 255).
pub fn encode_ppm(frame: &Canvas) -> Vec<u8> {
    let header = format!("P6 {} {} 255\n", frame.width(), frame.height());
    let mut out = Vec::with_capacity(header.len() + frame.as_rgb().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(frame.as_rgb());
    out
}

/// Writes `frame_000001.ppm`, `frame_000002.ppm`, ... into `dir`, creating
/// it if needed.
pub fn write_ppm_sequence(fs: &FrameSet, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    fs.frames
        .iter()
        .enumerate()
        .map(|(k, frame)| {
            let path = dir.join(format!("frame_{:06}.ppm", k + 1));
            fs::write(&path, encode_ppm(frame)).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
