//! Run configuration: presets, the flat `key = value` file format and the
//! resolved echo printed by `--print-config`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use slowfast_core::render::{ProjectionMode, MAX_GIF_SIDE};
use slowfast_core::systems::SystemId;
use slowfast_core::{IntegratorConfig, SystemSpec};

pub const DEFAULT_OUT_DIR: &str = "slowfast-out";
pub const OUT_DIR_ENV: &str = "SLOWFAST_SIM_OUT";

/// A configuration problem tied to the key that caused it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{key}: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Animate,
    Analyze,
}

macro_rules! named_enum {
    ($ty:ident, $what:literal, { $($variant:ident => $name:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $ty {
            $($variant),+
        }

        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($ty::$variant => $name),+
                }
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    other => Err(format!(
                        concat!("unknown ", $what, " `{}` (expected one of: {})"),
                        other,
                        [$($name),+].join(", ")
                    )),
                }
            }
        }
    };
}

named_enum!(Output, "output", {
    Csv => "csv",
    Ndjson => "ndjson",
    Frames => "frames",
    Gif => "gif",
    Report => "report",
});

named_enum!(Analysis, "analysis", {
    Equilibria => "equilibria",
    Segments => "segments",
    Period => "period",
    Lyapunov => "lyapunov",
});

/// One side of the projection window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AxisRange {
    Auto,
    Fixed(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionConfig {
    pub mode: ProjectionMode,
    pub u: AxisRange,
    pub v: AxisRange,
    /// Fraction of the data span added on each side of an auto axis.
    pub margin: f64,
    pub width: u32,
    pub height: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Animation {
    /// `None` picks a stride giving about [`TARGET_FRAMES`] frames.
    pub every: Option<usize>,
    /// Centiseconds per GIF frame.
    pub delay: u16,
    pub trail: Option<usize>,
}

pub const TARGET_FRAMES: usize = 200;

impl Animation {
    pub fn stride(&self, points: usize) -> usize {
        self.every
            .unwrap_or_else(|| points.saturating_sub(1).div_ceil(TARGET_FRAMES - 1).max(1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovConfig {
    pub horizon: f64,
    pub renorm_interval: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub system: SystemSpec,
    pub initial_state: Vec<f64>,
    pub integrator: IntegratorConfig,
    pub outputs: BTreeSet<Output>,
    pub projection: ProjectionConfig,
    pub animation: Animation,
    pub analysis: BTreeSet<Analysis>,
    pub lyapunov: LyapunovConfig,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Preset run for `id`: the builtin parameters, initial state, duration
    /// and view, with outputs chosen by the subcommand.
    pub fn preset(command: Command, id: SystemId, out_dir: PathBuf) -> Self {
        let (mode, u, v) = match id {
            SystemId::VanDerPol => (
                ProjectionMode::Plane2d { i: 0, j: 1 },
                AxisRange::Fixed(-3.0, 3.0),
                AxisRange::Fixed(-3.0, 3.0),
            ),
            SystemId::Chua => (
                ProjectionMode::Ortho3d {
                    azimuth_deg: 0.0,
                    elevation_deg: 0.0,
                },
                AxisRange::Fixed(-2.0, 1.0),
                AxisRange::Auto,
            ),
            SystemId::Lorenz => (
                ProjectionMode::Ortho3d {
                    azimuth_deg: 0.0,
                    elevation_deg: 0.0,
                },
                AxisRange::Auto,
                AxisRange::Auto,
            ),
        };
        let (outputs, analysis) = match command {
            Command::Simulate => (vec![Output::Csv, Output::Report], vec![]),
            Command::Animate => (vec![Output::Gif, Output::Report], vec![]),
            Command::Analyze => (
                vec![Output::Report],
                vec![Analysis::Equilibria, Analysis::Segments, Analysis::Period],
            ),
        };
        Self {
            command,
            system: SystemSpec::preset(id),
            initial_state: id.preset_initial_state(),
            integrator: IntegratorConfig {
                t_final: id.preset_t_final(),
                ..IntegratorConfig::default()
            },
            outputs: outputs.into_iter().collect(),
            projection: ProjectionConfig {
                mode,
                u,
                v,
                margin: 0.1,
                width: 400,
                height: 400,
            },
            animation: Animation {
                every: None,
                delay: 4,
                trail: None,
            },
            analysis: analysis.into_iter().collect(),
            lyapunov: LyapunovConfig {
                horizon: 500.0,
                renorm_interval: 1.0,
            },
            out_dir,
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let err = |msg: String| ConfigError::new(key, msg);
        let value = value.trim();
        match key {
            "system" => {
                let id: SystemId = value.parse().map_err(|e: slowfast_core::Error| err(e.to_string()))?;
                if id != self.system.id() {
                    return Err(err(format!(
                        "configuration is for `{id}` but the command line selects `{}`",
                        self.system.id()
                    )));
                }
            }
            "ic" => self.initial_state = parse_list(key, value)?,
            "integrator.method" => self.integrator.method = value.parse().map_err(err)?,
            "integrator.rtol" => self.integrator.rtol = parse_num(key, value)?,
            "integrator.atol" => self.integrator.atol = parse_num(key, value)?,
            "integrator.h_init" => self.integrator.h_init = parse_num(key, value)?,
            "integrator.h_min" => self.integrator.h_min = parse_num(key, value)?,
            "integrator.h_max" => self.integrator.h_max = parse_num(key, value)?,
            "integrator.refine" => self.integrator.refine = parse_num(key, value)?,
            "integrator.t_final" => self.integrator.t_final = parse_num(key, value)?,
            "integrator.max_steps" => self.integrator.max_steps = parse_num(key, value)?,
            "outputs" => self.outputs = parse_set(key, value)?,
            "analysis" => self.analysis = parse_set(key, value)?,
            "projection" => self.projection.mode = parse_projection(key, value)?,
            "window.u" => self.projection.u = parse_axis(key, value)?,
            "window.v" => self.projection.v = parse_axis(key, value)?,
            "window.margin" => self.projection.margin = parse_num(key, value)?,
            "canvas.width" => self.projection.width = parse_num(key, value)?,
            "canvas.height" => self.projection.height = parse_num(key, value)?,
            "animation.every" => {
                self.animation.every = match value {
                    "auto" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "animation.delay" => self.animation.delay = parse_num(key, value)?,
            "animation.trail" => {
                self.animation.trail = match value {
                    "none" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "lyapunov.horizon" => self.lyapunov.horizon = parse_num(key, value)?,
            "lyapunov.renorm_interval" => self.lyapunov.renorm_interval = parse_num(key, value)?,
            "out" => {
                if value.is_empty() {
                    return Err(err("output directory must not be empty".into()));
                }
                self.out_dir = PathBuf::from(value)
            }
            _ => match key.strip_prefix("param.") {
                Some(name) => {
                    let v = parse_num(key, value)?;
                    self.system.set_param(name, v).map_err(|e| err(e.to_string()))?;
                }
                None => return Err(err("unknown key".into())),
            },
        }
        Ok(())
    }

    /// Checks cross-field invariants. Returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        let warnings = self.system.validate_params().map_err(|e| match e {
            slowfast_core::Error::InvalidParameter { name, reason } => {
                ConfigError::new(format!("param.{name}"), reason)
            }
            other => ConfigError::new("param", other.to_string()),
        })?;
        let dim = self.system.dimension();
        if self.initial_state.len() != dim {
            return Err(ConfigError::new(
                "ic",
                format!(
                    "{} needs {dim} initial values, got {}",
                    self.system.id(),
                    self.initial_state.len()
                ),
            ));
        }
        if self.initial_state.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::new("ic", "initial values must be finite"));
        }
        self.integrator.validate().map_err(|e| match e {
            slowfast_core::Error::InvalidParameter { name, reason } => {
                ConfigError::new(format!("integrator.{name}"), reason)
            }
            other => ConfigError::new("integrator", other.to_string()),
        })?;
        if self.integrator.t_final <= 0.0 {
            return Err(ConfigError::new("integrator.t_final", "must be > 0"));
        }
        if self.outputs.is_empty() {
            return Err(ConfigError::new("outputs", "at least one output is required"));
        }
        match self.projection.mode {
            ProjectionMode::Plane2d { i, j } => {
                if i == j {
                    return Err(ConfigError::new("projection", "plane2d axes must differ"));
                }
                if i.max(j) >= dim {
                    return Err(ConfigError::new(
                        "projection",
                        format!("axis {} out of range for dimension {dim}", i.max(j)),
                    ));
                }
            }
            ProjectionMode::Ortho3d { .. } if dim != 3 => {
                return Err(ConfigError::new(
                    "projection",
                    format!("ortho3d needs a 3-D system, {} has dimension {dim}", self.system.id()),
                ));
            }
            ProjectionMode::Ortho3d { .. } => {}
        }
        for (key, axis) in [("window.u", self.projection.u), ("window.v", self.projection.v)] {
            if let AxisRange::Fixed(lo, hi) = axis {
                if !(lo < hi) {
                    return Err(ConfigError::new(key, format!("need min < max, got {lo},{hi}")));
                }
            }
        }
        if !(self.projection.margin >= 0.0) {
            return Err(ConfigError::new("window.margin", "must be >= 0"));
        }
        for (key, side) in [
            ("canvas.width", self.projection.width),
            ("canvas.height", self.projection.height),
        ] {
            if !(16..=MAX_GIF_SIDE).contains(&side) {
                return Err(ConfigError::new(key, format!("must lie in 16..={MAX_GIF_SIDE}")));
            }
        }
        if self.animation.every == Some(0) {
            return Err(ConfigError::new("animation.every", "must be >= 1"));
        }
        if self.animation.trail == Some(0) {
            return Err(ConfigError::new("animation.trail", "must be >= 1"));
        }
        let ly = &self.lyapunov;
        if !(ly.renorm_interval > 0.0) || !ly.renorm_interval.is_finite() {
            return Err(ConfigError::new("lyapunov.renorm_interval", "must be > 0"));
        }
        if !(ly.horizon >= 2.0 * ly.renorm_interval) || !ly.horizon.is_finite() {
            return Err(ConfigError::new(
                "lyapunov.horizon",
                "must be at least twice the renormalisation interval",
            ));
        }
        Ok(warnings)
    }
}

/// Parses the flat config format: `key = value` lines, `#` comments, blank
/// lines ignored. Keys may appear once.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::new(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::new(format!("line {}", lineno + 1), "empty key"));
        }
        if entries.iter().any(|(k, _)| k == key) {
            return Err(ConfigError::new(key, format!("duplicate key on line {}", lineno + 1)));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError::new(key, format!("malformed number `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value.split(',').map(|v| parse_num(key, v)).collect()
}

fn parse_set<T: FromStr<Err = String> + Ord>(
    key: &str,
    value: &str,
) -> Result<BTreeSet<T>, ConfigError> {
    if value == "none" {
        return Ok(BTreeSet::new());
    }
    value
        .split(',')
        .map(|v| v.trim().parse().map_err(|e| ConfigError::new(key, e)))
        .collect()
}

fn parse_axis(key: &str, value: &str) -> Result<AxisRange, ConfigError> {
    if value == "auto" {
        return Ok(AxisRange::Auto);
    }
    match parse_list(key, value)?[..] {
        [lo, hi] => Ok(AxisRange::Fixed(lo, hi)),
        _ => Err(ConfigError::new(key, "expected `auto` or `min,max`")),
    }
}

pub fn parse_projection(key: &str, value: &str) -> Result<ProjectionMode, ConfigError> {
    let bad = || {
        ConfigError::new(
            key,
            format!("expected plane2d:i,j or ortho3d:azimuth,elevation, got `{value}`"),
        )
    };
    let (kind, args) = value.split_once(':').ok_or_else(bad)?;
    let (a, b) = args.split_once(',').ok_or_else(bad)?;
    match kind {
        "plane2d" => Ok(ProjectionMode::Plane2d {
            i: parse_num(key, a)?,
            j: parse_num(key, b)?,
        }),
        "ortho3d" => {
            let (azimuth_deg, elevation_deg) = (parse_num(key, a)?, parse_num(key, b)?);
            if !f64::is_finite(azimuth_deg) || !f64::is_finite(elevation_deg) {
                return Err(ConfigError::new(key, "angles must be finite"));
            }
            Ok(ProjectionMode::Ortho3d {
                azimuth_deg,
                elevation_deg,
            })
        }
        _ => Err(bad()),
    }
}

// Debug formatting of f64 is the shortest string that parses back to the
// same value.
struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

fn join<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> String) -> String {
    items.into_iter().map(f).collect::<Vec<_>>().join(",")
}

fn set_or_none<T: Copy>(set: &BTreeSet<T>, name: impl Fn(T) -> &'static str) -> String {
    if set.is_empty() {
        "none".to_string()
    } else {
        join(set.iter().copied(), |x| name(x).to_string())
    }
}

fn axis(a: AxisRange) -> String {
    match a {
        AxisRange::Auto => "auto".to_string(),
        AxisRange::Fixed(lo, hi) => format!("{},{}", Num(lo), Num(hi)),
    }
}

impl fmt::Display for RunConfig {
    /// The resolved configuration in the config-file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ig = &self.integrator;
        writeln!(f, "system = {}", self.system.id())?;
        for (name, value) in self.system.params() {
            writeln!(f, "param.{name} = {}", Num(value))?;
        }
        writeln!(f, "ic = {}", join(&self.initial_state, |v| Num(*v).to_string()))?;
        writeln!(f, "integrator.method = {}", ig.method.name())?;
        writeln!(f, "integrator.rtol = {}", Num(ig.rtol))?;
        writeln!(f, "integrator.atol = {}", Num(ig.atol))?;
        writeln!(f, "integrator.h_init = {}", Num(ig.h_init))?;
        writeln!(f, "integrator.h_min = {}", Num(ig.h_min))?;
        writeln!(f, "integrator.h_max = {}", Num(ig.h_max))?;
        writeln!(f, "integrator.refine = {}", ig.refine)?;
        writeln!(f, "integrator.t_final = {}", Num(ig.t_final))?;
        writeln!(f, "integrator.max_steps = {}", ig.max_steps)?;
        writeln!(f, "outputs = {}", set_or_none(&self.outputs, Output::name))?;
        writeln!(f, "analysis = {}", set_or_none(&self.analysis, Analysis::name))?;
        let p = &self.projection;
        match p.mode {
            ProjectionMode::Plane2d { i, j } => writeln!(f, "projection = plane2d:{i},{j}")?,
            ProjectionMode::Ortho3d {
                azimuth_deg,
                elevation_deg,
            } => writeln!(f, "projection = ortho3d:{},{}", Num(azimuth_deg), Num(elevation_deg))?,
        }
        writeln!(f, "window.u = {}", axis(p.u))?;
        writeln!(f, "window.v = {}", axis(p.v))?;
        writeln!(f, "window.margin = {}", Num(p.margin))?;
        writeln!(f, "canvas.width = {}", p.width)?;
        writeln!(f, "canvas.height = {}", p.height)?;
        let a = &self.animation;
        match a.every {
            Some(k) => writeln!(f, "animation.every = {k}")?,
            None => writeln!(f, "animation.every = auto")?,
        }
        writeln!(f, "animation.delay = {}", a.delay)?;
        match a.trail {
            Some(k) => writeln!(f, "animation.trail = {k}")?,
            None => writeln!(f, "animation.trail = none")?,
        }
        writeln!(f, "lyapunov.horizon = {}", Num(self.lyapunov.horizon))?;
        writeln!(f, "lyapunov.renorm_interval = {}", Num(self.lyapunov.renorm_interval))?;
        writeln!(f, "out = {}", self.out_dir.display())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vdp() -> RunConfig {
        RunConfig::preset(Command::Simulate, SystemId::VanDerPol, DEFAULT_OUT_DIR.into())
    }

    #[test]
    fn presets_carry_the_published_parameters() {
        let v = RunConfig::preset(Command::Simulate, SystemId::VanDerPol, "o".into());
        assert_eq!(v.system.params(), vec![("epsilon", 1.0 / 20.0)]);
        assert_eq!(v.projection.mode, ProjectionMode::Plane2d { i: 0, j: 1 });
        let c = RunConfig::preset(Command::Simulate, SystemId::Chua, "o".into());
        assert_eq!(c.system.params(), vec![("epsilon", 0.05), ("mu", 2.0)]);
        let l = RunConfig::preset(Command::Simulate, SystemId::Lorenz, "o".into());
        assert_eq!(
            l.system.params(),
            vec![("sigma", 10.0), ("r", 28.0), ("beta", 8.0 / 3.0)]
        );
        assert!(matches!(l.projection.mode, ProjectionMode::Ortho3d { .. }));
        for cfg in [v, c, l] {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn subcommand_picks_default_outputs() {
        let a = RunConfig::preset(Command::Animate, SystemId::Lorenz, "o".into());
        assert!(a.outputs.contains(&Output::Gif));
        let z = RunConfig::preset(Command::Analyze, SystemId::Lorenz, "o".into());
        assert_eq!(z.outputs, [Output::Report].into_iter().collect());
        assert!(z.analysis.contains(&Analysis::Equilibria));
    }

    #[test]
    fn set_overrides_and_rejects_unknown_keys() {
        let mut c = RunConfig::preset(Command::Simulate, SystemId::Chua, "o".into());
        c.set("param.mu", "3").unwrap();
        assert_eq!(c.system.params(), vec![("epsilon", 0.05), ("mu", 3.0)]);
        assert_eq!(c.set("param.sigma", "1").unwrap_err().key, "param.sigma");
        assert_eq!(c.set("integrator.tolerance", "1").unwrap_err().key, "integrator.tolerance");
        assert_eq!(c.set("integrator.rtol", "abc").unwrap_err().key, "integrator.rtol");
        assert_eq!(c.set("system", "lorenz").unwrap_err().key, "system");
        c.set("system", "chua").unwrap();
    }

    #[test]
    fn validation_names_the_key() {
        let mut c = vdp();
        c.set("ic", "1,2,3").unwrap();
        assert_eq!(c.validate().unwrap_err().key, "ic");

        let mut c = vdp();
        c.set("param.epsilon", "0").unwrap();
        assert_eq!(c.validate().unwrap_err().key, "param.epsilon");

        let mut c = vdp();
        c.set("projection", "ortho3d:10,20").unwrap();
        assert_eq!(c.validate().unwrap_err().key, "projection");

        let mut c = vdp();
        c.set("integrator.refine", "0").unwrap();
        assert_eq!(c.validate().unwrap_err().key, "integrator.refine");

        let mut c = vdp();
        c.set("outputs", "none").unwrap();
        assert_eq!(c.validate().unwrap_err().key, "outputs");
    }

    #[test]
    fn large_epsilon_only_warns() {
        let mut c = vdp();
        c.set("param.epsilon", "0.5").unwrap();
        assert_eq!(c.validate().unwrap().len(), 1);
    }

    #[test]
    fn entries_parse_comments_and_reject_duplicates() {
        let e = parse_entries("# header\nic = 1,2  # trailing\n\n param.epsilon=0.1\n").unwrap();
        assert_eq!(
            e,
            vec![
                ("ic".to_string(), "1,2".to_string()),
                ("param.epsilon".to_string(), "0.1".to_string())
            ]
        );
        assert!(parse_entries("ic = 1\nic = 2\n").is_err());
        assert!(parse_entries("just words\n").is_err());
    }

    #[test]
    fn printed_config_round_trips() {
        for id in SystemId::ALL {
            let mut c = RunConfig::preset(Command::Animate, id, "some/dir".into());
            c.set("integrator.rtol", "1e-7").unwrap();
            c.set("animation.trail", "40").unwrap();
            let text = c.to_string();
            let mut d = RunConfig::preset(Command::Animate, id, "elsewhere".into());
            d.set("outputs", "csv").unwrap();
            for (k, v) in parse_entries(&text).unwrap() {
                d.set(&k, &v).unwrap();
            }
            assert_eq!(c, d);
            assert_eq!(text, d.to_string());
        }
    }

    #[test]
    fn floats_print_shortest_round_trip() {
        let c = RunConfig::preset(Command::Simulate, SystemId::Lorenz, "o".into());
        let text = c.to_string();
        assert!(text.contains("param.beta = 2.6666666666666665\n"));
        assert!(text.contains("integrator.atol = 1e-9\n"));
    }

    #[test]
    fn auto_stride_targets_two_hundred_frames() {
        let a = Animation {
            every: None,
            delay: 4,
            trail: None,
        };
        assert_eq!(a.stride(1), 1);
        assert_eq!(a.stride(200), 1);
        assert_eq!(a.stride(201), 2);
        let n = 40_001;
        assert!((n - 1) / a.stride(n) + 1 <= TARGET_FRAMES);
    }
}
