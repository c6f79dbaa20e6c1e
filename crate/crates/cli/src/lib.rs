//! `slowfast-sim`: simulate, animate and analyse the Van der Pol, Chua and
//! Lorenz systems from the command line.
//!
//! Settings resolve in three layers: the system preset, then an optional
//! config file (`--config`), then command-line flags. Exit codes are 0 on
//! success, 1 for numerical or I/O failures and 2 for configuration errors.

pub mod config;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use slowfast_core::systems::SystemId;

pub use config::{Analysis, Command, ConfigError, Output, RunConfig};
pub use run::{execute, RunOutcome};

#[derive(Debug, Parser)]
#[command(name = "slowfast-sim", version, about = "Animated phase portraits and slow-fast diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Integrate and write the state series (default outputs: csv, report)
    Simulate(RunArgs),
    /// Integrate and render an animated phase portrait (default: gif, report)
    Animate(RunArgs),
    /// Integrate and run diagnostics (default: equilibria, segments, period)
    Analyze(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// vanderpol, chua or lorenz
    pub system: String,
    /// Override a system parameter, e.g. `--param mu=3`
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    pub params: Vec<String>,
    /// Initial state, comma separated
    #[arg(long, value_name = "V1,V2,...", allow_hyphen_values = true)]
    pub ic: Option<String>,
    #[arg(long, value_name = "T")]
    pub t_final: Option<String>,
    #[arg(long, value_name = "R")]
    pub rtol: Option<String>,
    #[arg(long, value_name = "A")]
    pub atol: Option<String>,
    /// Output points per accepted step
    #[arg(long, value_name = "N")]
    pub refine: Option<String>,
    /// plane2d:i,j or ortho3d:azimuth,elevation (degrees)
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    pub projection: Option<String>,
    /// Refined points per frame, or `auto`
    #[arg(long, value_name = "K")]
    pub every: Option<String>,
    /// GIF frame delay in centiseconds
    #[arg(long, value_name = "CS")]
    pub delay: Option<String>,
    /// Draw only the last N refined points, or `none`
    #[arg(long, value_name = "N")]
    pub trail: Option<String>,
    /// Output directory (default: $SLOWFAST_SIM_OUT or ./slowfast-out)
    #[arg(long, value_name = "DIR")]
    pub out: Option<String>,
    /// Comma list of csv, ndjson, frames, gif, report
    #[arg(long, value_name = "LIST")]
    pub outputs: Option<String>,
    /// Comma list of equilibria, segments, period, lyapunov, or `none`
    #[arg(long, value_name = "LIST")]
    pub analysis: Option<String>,
    /// Set any config key, e.g. `--set integrator.max_steps=1000`
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    pub set: Vec<String>,
    /// Config file of `key = value` lines
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration and exit
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Run(#[from] slowfast_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(slowfast_core::Error::InvalidParameter { .. }) => 2,
            CliError::Run(_) => 1,
        }
    }
}

fn split_kv<'a>(flag: &str, s: &'a str) -> Result<(&'a str, &'a str), ConfigError> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| ConfigError::new(flag, format!("expected NAME=VALUE, got `{s}`")))
}

/// Builds the run configuration: preset, then config file, then flags.
/// `env_out` is the value of `SLOWFAST_SIM_OUT`, if set.
pub fn resolve(
    command: Command,
    args: &RunArgs,
    env_out: Option<OsString>,
) -> Result<(RunConfig, Vec<String>), ConfigError> {
    let id: SystemId = args
        .system
        .parse()
        .map_err(|e: slowfast_core::Error| ConfigError::new("system", e.to_string()))?;
    let out_dir = env_out
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUT_DIR));
    let mut cfg = RunConfig::preset(command, id, out_dir);

    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        for (k, v) in config::parse_entries(&text)? {
            cfg.set(&k, &v)?;
        }
    }

    for s in &args.set {
        let (k, v) = split_kv("--set", s)?;
        cfg.set(k, v)?;
    }
    for p in &args.params {
        let (k, v) = split_kv("--param", p)?;
        cfg.set(&format!("param.{k}"), v)?;
    }
    let flags = [
        ("ic", &args.ic),
        ("integrator.t_final", &args.t_final),
        ("integrator.rtol", &args.rtol),
        ("integrator.atol", &args.atol),
        ("integrator.refine", &args.refine),
        ("projection", &args.projection),
        ("animation.every", &args.every),
        ("animation.delay", &args.delay),
        ("animation.trail", &args.trail),
        ("outputs", &args.outputs),
        ("analysis", &args.analysis),
        ("out", &args.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    let warnings = cfg.validate()?;
    Ok((cfg, warnings))
}

/// Runs the tool on `args` (including the program name) and returns the exit
/// code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (command, args) = match &cli.command {
        CommandArgs::Simulate(a) => (Command::Simulate, a),
        CommandArgs::Animate(a) => (Command::Animate, a),
        CommandArgs::Analyze(a) => (Command::Analyze, a),
    };
    match run_args(command, args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("slowfast-sim: {e}");
            e.exit_code()
        }
    }
}

fn run_args(command: Command, args: &RunArgs) -> Result<(), CliError> {
    let (cfg, warnings) = resolve(command, args, std::env::var_os(config::OUT_DIR_ENV))?;
    if args.print_config {
        print!("{cfg}");
        return Ok(());
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let outcome = execute(&cfg, warnings)?;
    for path in &outcome.written {
        println!("{}", path.display());
    }
    Ok(())
}
