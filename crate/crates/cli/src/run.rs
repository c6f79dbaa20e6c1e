use std::fs;
use std::path::{Path, PathBuf};

use slowfast_core::analysis::{
    default_seeds, estimate_period, find_equilibria, largest_lyapunov, segment_slow_fast, Section,
    SpeedLabel, DEFAULT_PERIOD_WINDOW,
};
use slowfast_core::render::{
    emit_ndjson, emit_timeseries_csv, render_frames, write_gif, write_ppm_sequence, Projection,
    Style, Window,
};
use slowfast_core::{integrate, Error, Result, State, Trajectory};

use crate::config::{Analysis, AxisRange, Output, ProjectionConfig, RunConfig};
use crate::report::{AnimationReport, LyapunovReport, PeriodReport, Report, SegmentReport};

/// Artifacts of one run.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub written: Vec<PathBuf>,
}

/// Fills the auto sides of the window from the projected trajectory.
pub fn resolve_window(p: &ProjectionConfig, traj: &Trajectory) -> Result<Window> {
    if let (AxisRange::Fixed(a, b), AxisRange::Fixed(c, d)) = (p.u, p.v) {
        return Ok(Window::new(a, b, c, d));
    }
    let projected = traj
        .refined_points
        .iter()
        .map(|s| p.mode.apply(&s.x))
        .collect::<Result<Vec<_>>>()?;
    let fit = Window::fit(projected, p.margin)
        .ok_or_else(|| Error::Domain("no finite points to fit the window to".into()))?;
    let (x_min, x_max) = match p.u {
        AxisRange::Fixed(lo, hi) => (lo, hi),
        AxisRange::Auto => (fit.x_min, fit.x_max),
    };
    let (y_min, y_max) = match p.v {
        AxisRange::Fixed(lo, hi) => (lo, hi),
        AxisRange::Auto => (fit.y_min, fit.y_max),
    };
    Ok(Window::new(x_min, x_max, y_min, y_max))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn execute(cfg: &RunConfig, warnings: Vec<String>) -> Result<RunOutcome> {
    let spec = &cfg.system;
    let x0 = State::new(0.0, cfg.initial_state.clone());
    let traj = integrate(spec, &x0, &cfg.integrator, None)?;

    let mut report = Report {
        system: spec.id().name(),
        params: spec.params().into_iter().collect(),
        initial_state: cfg.initial_state.clone(),
        integrator: cfg.integrator.clone(),
        stats: traj.stats,
        refined_points: traj.refined_points.len(),
        final_state: traj.last().clone(),
        warnings,
        animation: None,
        equilibria: None,
        segments: None,
        period: None,
        lyapunov: None,
    };

    for analysis in &cfg.analysis {
        match analysis {
            Analysis::Equilibria => {
                report.equilibria = Some(find_equilibria(spec, &default_seeds(spec))?);
            }
            Analysis::Segments => {
                let seg = segment_slow_fast(spec, &traj, None)?;
                report.segments = Some(SegmentReport {
                    threshold: seg.threshold,
                    slow_segments: seg.count(SpeedLabel::Slow),
                    fast_segments: seg.count(SpeedLabel::Fast),
                    mean_slow_speed: seg.mean_speed(SpeedLabel::Slow),
                    mean_fast_speed: seg.mean_speed(SpeedLabel::Fast),
                    segments: seg.segments,
                });
            }
            Analysis::Period => {
                let section = Section::default_for(spec);
                let estimate = estimate_period(&traj, &section, DEFAULT_PERIOD_WINDOW)?;
                report.period = Some(PeriodReport { section, estimate });
            }
            Analysis::Lyapunov => {
                let ly = &cfg.lyapunov;
                let exponent =
                    largest_lyapunov(spec, &x0, &cfg.integrator, ly.horizon, ly.renorm_interval)?;
                report.lyapunov = Some(LyapunovReport {
                    exponent,
                    horizon: ly.horizon,
                    renorm_interval: ly.renorm_interval,
                });
            }
        }
    }

    let out = &cfg.out_dir;
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.clone(),
        source,
    })?;
    let mut written = Vec::new();

    if cfg.outputs.contains(&Output::Csv) {
        let path = out.join("timeseries.csv");
        emit_timeseries_csv(&traj, &path)?;
        written.push(path);
    }
    if cfg.outputs.contains(&Output::Ndjson) {
        let path = out.join("states.ndjson");
        emit_ndjson(spec, &traj, &path)?;
        written.push(path);
    }
    if cfg.outputs.contains(&Output::Frames) || cfg.outputs.contains(&Output::Gif) {
        let p = &cfg.projection;
        let window = resolve_window(p, &traj)?;
        let projection = Projection::new(p.mode, window, p.width, p.height)?;
        let every = cfg.animation.stride(traj.refined_points.len());
        let style = Style {
            trail_length: cfg.animation.trail,
            ..Style::default()
        };
        let frames = render_frames(&traj, &projection, every, &style)?;
        report.animation = Some(AnimationReport {
            frames: frames.len(),
            every,
            window,
        });
        if cfg.outputs.contains(&Output::Frames) {
            let dir = out.join("frames");
            fs::create_dir_all(&dir).map_err(|source| Error::Io {
                path: dir.clone(),
                source,
            })?;
            written.extend(write_ppm_sequence(&frames, &dir)?);
        }
        if cfg.outputs.contains(&Output::Gif) {
            let path = out.join("animation.gif");
            write_gif(&frames, &path, cfg.animation.delay)?;
            written.push(path);
        }
    }
    if cfg.outputs.contains(&Output::Report) {
        let path = out.join("report.json");
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        write_file(&path, json.as_bytes())?;
        written.push(path);
    }
    Ok(RunOutcome { report, written })
}
