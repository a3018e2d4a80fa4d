//! Command-line front end: figure data, scans and heatmaps.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure.

// `!(x < tol)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;

pub use config::{Command, FigureId, FigureSelection, Format, RunConfig};
pub use output::{render_heatmap, NegativePolicy};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid `{key}`: {reason}")]
    Usage { key: String, reason: String },
    /// Carries the failing stage in its message.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn usage(key: &str, reason: impl Into<String>) -> Self {
        CliError::Usage { key: key.to_string(), reason: reason.into() }
    }

    /// Classifies a core error raised while running `stage`.
    pub fn core(stage: &str, e: tmsv_core::Error) -> Self {
        match e {
            tmsv_core::Error::InvalidArgument { name, reason } => CliError::usage(name, reason),
            e if e.is_numerical() => CliError::Numerical(format!("{stage}: {e}")),
            e => CliError::usage(stage, e.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tmsv", version, about = "Photon-subtracted two-mode squeezed vacuum: figure data, scans, heatmaps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandArg>,
    /// Plain `key=value` file; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Squeezing magnitude (default 0.8)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Squeezing phase (default π/2)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Photons subtracted (default 1)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// XMIN:XMAX:N[,YMIN:YMAX:N]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// xy, pxpy, xpx, ypy, xpy or ypx
    #[arg(long, global = true)]
    pub slice: Option<String>,
    /// Values of the two remaining axes, e.g. px=0,y=0.5
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub fixed: Option<String>,
    /// Output directory (default ./out)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<String>,
    /// Comma-separated subset of csv, json, pgm
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Truncation (Fock cutoff or series length); `auto` by default
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub cutoff: Option<String>,
    /// Fock truncation tolerance (default 1e-12)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<String>,
    /// Measure for `scan`
    #[arg(long, global = true)]
    pub measure: Option<String>,
    /// START:STOP:STEP for `scan`
    #[arg(long = "r-grid", global = true, allow_hyphen_values = true)]
    pub r_grid: Option<String>,
    /// Schmidt coefficient convention: paper_literal or operator_derived
    #[arg(long, global = true)]
    pub source: Option<String>,
    /// Normalize Schmidt coefficients (true/false)
    #[arg(long, global = true)]
    pub normalize: Option<String>,
    /// Beam-splitter transmittance for `herald`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub transmittance: Option<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CommandArg {
    /// Data behind one figure (fig2..fig7) or `all`
    Reproduce { figure: String },
    /// Wigner slice and its negativity
    Wigner,
    /// Entanglement measure over an r grid
    Scan,
    /// Phase singularities of the wavefunction
    Vortex,
    /// Heralded subtraction against the ideal state
    Herald,
    /// Intensity and phase of the wavefunction
    Wavefield,
}

/// Defaults, then the config file, then flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    match &cli.command {
        Some(CommandArg::Reproduce { figure }) => {
            cfg.set("command", "reproduce")?;
            cfg.set("figure", figure)?;
        }
        Some(CommandArg::Wigner) => cfg.set("command", "wigner")?,
        Some(CommandArg::Scan) => cfg.set("command", "scan")?,
        Some(CommandArg::Vortex) => cfg.set("command", "vortex")?,
        Some(CommandArg::Herald) => cfg.set("command", "herald")?,
        Some(CommandArg::Wavefield) => cfg.set("command", "wavefield")?,
        None => {}
    }
    let flags = [
        ("r", &cli.r),
        ("theta", &cli.theta),
        ("k", &cli.k),
        ("grid", &cli.grid),
        ("slice", &cli.slice),
        ("fixed", &cli.fixed),
        ("out", &cli.out),
        ("format", &cli.format),
        ("cutoff", &cli.cutoff),
        ("tol", &cli.tol),
        ("measure", &cli.measure),
        ("r-grid", &cli.r_grid),
        ("source", &cli.source),
        ("normalize", &cli.normalize),
        ("transmittance", &cli.transmittance),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `argv` (program name first), runs, and returns the exit code.
/// Diagnostics go to stderr; the list of written files to stdout.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = resolve(&cli).and_then(|cfg| {
        if cfg.command.is_none() {
            return Err(CliError::usage("command", "no command given on the command line or in the config file"));
        }
        commands::run(&cfg)
    });
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("tmsv: {e}");
            e.exit_code()
        }
    }
}
