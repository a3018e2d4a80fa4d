//! Run configuration: built-in defaults, then a `key=value` file, then flags.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use tmsv_core::entanglement::{CoefficientKind, CoefficientSource, MeasureKind};
use tmsv_core::wigner::{Axis, SlicePlane};
use tmsv_core::{GridSpec, SqueezeParams};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Reproduce,
    Wigner,
    Scan,
    Vortex,
    Herald,
    Wavefield,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Reproduce, Command::Wigner, Command::Scan, Command::Vortex, Command::Herald, Command::Wavefield];

    pub fn name(self) -> &'static str {
        match self {
            Command::Reproduce => "reproduce",
            Command::Wigner => "wigner",
            Command::Scan => "scan",
            Command::Vortex => "vortex",
            Command::Herald => "herald",
            Command::Wavefield => "wavefield",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 6] =
        [FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }

    pub fn parse(s: &str) -> Option<FigureId> {
        FigureId::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Which figures `reproduce` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureSelection {
    One(FigureId),
    All,
}

impl FigureSelection {
    pub fn name(self) -> &'static str {
        match self {
            FigureSelection::One(f) => f.name(),
            FigureSelection::All => "all",
        }
    }

    pub fn figures(self) -> Vec<FigureId> {
        match self {
            FigureSelection::One(f) => vec![f],
            FigureSelection::All => FigureId::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Pgm,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Pgm => "pgm",
        }
    }
}

/// Inclusive `start:stop:step` squeezing grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RGrid {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        tmsv_core::entanglement::r_range(self.start, self.stop, self.step)
            .map_err(|_| CliError::usage("r-grid", "need 0 < start ≤ stop and step > 0"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub figure: Option<FigureSelection>,
    pub r: f64,
    pub theta: f64,
    pub k: usize,
    pub grid: GridSpec,
    pub slice: SlicePlane,
    /// As given; resolved against `slice` by [`RunConfig::fixed_values`].
    pub fixed: Vec<(Axis, f64)>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    /// `None` picks truncations automatically from the tail bounds.
    pub cutoff: Option<usize>,
    /// Fock-space truncation tolerance (discarded probability).
    pub tol: f64,
    pub measure: MeasureKind,
    pub r_grid: RGrid,
    pub source: CoefficientKind,
    pub normalize: bool,
    pub transmittance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            figure: None,
            r: 0.8,
            theta: FRAC_PI_2,
            k: 1,
            grid: GridSpec::square(3.0, 201).expect("static grid"),
            slice: SlicePlane::XY,
            fixed: Vec::new(),
            out: PathBuf::from("out"),
            formats: vec![Format::Csv],
            cutoff: None,
            tol: 1e-12,
            measure: MeasureKind::LogNegativity,
            r_grid: RGrid { start: 0.05, stop: 2.5, step: 0.05 },
            source: CoefficientKind::OperatorDerived,
            normalize: true,
            transmittance: 0.99,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    let v: f64 = value.parse().map_err(|_| CliError::usage(key, format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::usage(key, format!("`{value}` is not finite")));
    }
    Ok(v)
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse()
        .map_err(|_| CliError::usage(key, format!("`{value}` is not a non-negative integer")))
}

fn parse_axis_range(key: &str, part: &str) -> Result<((f64, f64), usize), CliError> {
    let fields: Vec<&str> = part.split(':').collect();
    if fields.len() != 3 {
        return Err(CliError::usage(key, format!("`{part}` is not MIN:MAX:N")));
    }
    let lo = parse_f64(key, fields[0])?;
    let hi = parse_f64(key, fields[1])?;
    let n = parse_usize(key, fields[2])?;
    Ok(((lo, hi), n))
}

pub fn parse_grid(value: &str) -> Result<GridSpec, CliError> {
    let parts: Vec<&str> = value.split(',').collect();
    let (xr, nx) = match parts.as_slice() {
        [x] | [x, _] => parse_axis_range("grid", x)?,
        _ => return Err(CliError::usage("grid", format!("`{value}` is not XMIN:XMAX:N[,YMIN:YMAX:N]"))),
    };
    let (yr, ny) = if parts.len() == 2 { parse_axis_range("grid", parts[1])? } else { (xr, nx) };
    GridSpec::new(xr, yr, nx, ny).map_err(|e| CliError::usage("grid", e.to_string()))
}

fn format_grid(g: &GridSpec) -> String {
    format!("{}:{}:{},{}:{}:{}", g.x_range.0, g.x_range.1, g.nx, g.y_range.0, g.y_range.1, g.ny)
}

impl RunConfig {
    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "command" => {
                self.command = Some(Command::parse(value).ok_or_else(|| {
                    CliError::usage("command", format!("unknown command `{value}`"))
                })?)
            }
            "figure" => {
                self.figure = Some(if value == "all" {
                    FigureSelection::All
                } else {
                    FigureSelection::One(FigureId::parse(value).ok_or_else(|| {
                        CliError::usage("figure", format!("unknown figure `{value}` (fig2..fig7 or all)"))
                    })?)
                })
            }
            "r" => {
                let r = parse_f64("r", value)?;
                if r < 0.0 {
                    return Err(CliError::usage("r", "must be ≥ 0"));
                }
                self.r = r;
            }
            "theta" => self.theta = parse_f64("theta", value)?,
            "k" => self.k = parse_usize("k", value)?,
            "grid" => self.grid = parse_grid(value)?,
            "slice" => {
                self.slice = SlicePlane::parse(value)
                    .ok_or_else(|| CliError::usage("slice", format!("unknown plane `{value}`")))?
            }
            "fixed" => {
                let mut fixed = Vec::new();
                for item in value.split(',').filter(|s| !s.trim().is_empty()) {
                    let (name, v) = item
                        .split_once('=')
                        .ok_or_else(|| CliError::usage("fixed", format!("`{item}` is not AXIS=VALUE")))?;
                    let axis = Axis::parse(name.trim())
                        .ok_or_else(|| CliError::usage("fixed", format!("unknown axis `{}`", name.trim())))?;
                    fixed.push((axis, parse_f64("fixed", v.trim())?));
                }
                self.fixed = fixed;
            }
            "out" => {
                if value.is_empty() {
                    return Err(CliError::usage("out", "empty path"));
                }
                self.out = PathBuf::from(value);
            }
            "format" => {
                let mut formats = Vec::new();
                for f in value.split(',').map(str::trim) {
                    let fmt = match f {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        "pgm" => Format::Pgm,
                        _ => return Err(CliError::usage("format", format!("unknown format `{f}`"))),
                    };
                    if !formats.contains(&fmt) {
                        formats.push(fmt);
                    }
                }
                formats.sort();
                self.formats = formats;
            }
            "cutoff" => {
                self.cutoff = if value == "auto" { None } else { Some(parse_usize("cutoff", value)?) };
            }
            "tol" => {
                let t = parse_f64("tol", value)?;
                if !(t > 0.0 && t < 1.0) {
                    return Err(CliError::usage("tol", "must lie in (0, 1)"));
                }
                self.tol = t;
            }
            "measure" => {
                self.measure = MeasureKind::parse(value)
                    .ok_or_else(|| CliError::usage("measure", format!("unknown measure `{value}`")))?
            }
            "r-grid" | "r_grid" => {
                let g = match value.split(':').collect::<Vec<_>>().as_slice() {
                    [a, b, c] => RGrid {
                        start: parse_f64("r-grid", a)?,
                        stop: parse_f64("r-grid", b)?,
                        step: parse_f64("r-grid", c)?,
                    },
                    _ => return Err(CliError::usage("r-grid", format!("`{value}` is not START:STOP:STEP"))),
                };
                g.values()?;
                self.r_grid = g;
            }
            "source" => {
                self.source = CoefficientKind::parse(value)
                    .ok_or_else(|| CliError::usage("source", format!("unknown source `{value}`")))?
            }
            "normalize" => {
                self.normalize = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(CliError::usage("normalize", format!("`{value}` is not true/false"))),
                }
            }
            "transmittance" => {
                let t = parse_f64("transmittance", value)?;
                if !(t > 0.0 && t < 1.0) {
                    return Err(CliError::usage("transmittance", "must lie in (0, 1)"));
                }
                self.transmittance = t;
            }
            _ => return Err(CliError::usage(key, "unknown key")),
        }
        Ok(())
    }

    /// Reads `key=value` lines; `#` starts a comment line.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage("config", format!("cannot read {}: {e}", path.display())))?;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage("config", format!("{}:{}: `{line}` is not key=value", path.display(), n + 1))
            })?;
            let key = key.trim();
            if key == "config" {
                return Err(CliError::usage("config", "config files cannot include other config files"));
            }
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<SqueezeParams, CliError> {
        SqueezeParams::new(self.r, self.theta).map_err(|e| CliError::usage("r", e.to_string()))
    }

    pub fn coefficient_source(&self) -> CoefficientSource {
        CoefficientSource::new(self.source, self.normalize)
    }

    /// Values of the slice's complementary axes (default 0).
    pub fn fixed_values(&self) -> Result<[f64; 2], CliError> {
        let (a, b) = self.slice.fixed_axes();
        let mut out = [0.0, 0.0];
        for &(axis, v) in &self.fixed {
            if axis == a {
                out[0] = v;
            } else if axis == b {
                out[1] = v;
            } else {
                return Err(CliError::usage(
                    "fixed",
                    format!("`{}` is an axis of the {} slice; fix {} and {}", axis.name(), self.slice.name(), a.name(), b.name()),
                ));
            }
        }
        Ok(out)
    }

    /// Cross-field checks once every source has been applied.
    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        self.fixed_values()?;
        if self.formats.is_empty() {
            return Err(CliError::usage("format", "at least one format is required"));
        }
        if self.command == Some(Command::Reproduce) && self.figure.is_none() {
            return Err(CliError::usage("figure", "reproduce needs a figure (fig2..fig7 or all)"));
        }
        if self.k > 64 {
            return Err(CliError::usage("k", "orders above 64 are not supported"));
        }
        Ok(())
    }

    /// `key=value` lines that reproduce this configuration.
    pub fn to_conf(&self) -> String {
        let mut s = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(s, "{key}={value}");
        }
        s
    }

    /// Resolved settings in manifest order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        if let Some(c) = self.command {
            v.push(("command", c.name().to_string()));
        }
        if let Some(f) = self.figure {
            v.push(("figure", f.name().to_string()));
        }
        v.push(("r", self.r.to_string()));
        v.push(("theta", self.theta.to_string()));
        v.push(("k", self.k.to_string()));
        v.push(("grid", format_grid(&self.grid)));
        v.push(("slice", self.slice.name().to_string()));
        let fixed = self.fixed_values().unwrap_or([0.0, 0.0]);
        let (a, b) = self.slice.fixed_axes();
        v.push(("fixed", format!("{}={},{}={}", a.name(), fixed[0], b.name(), fixed[1])));
        v.push(("out", self.out.display().to_string()));
        v.push(("format", self.formats.iter().map(|f| f.name()).collect::<Vec<_>>().join(",")));
        v.push(("cutoff", self.cutoff.map_or("auto".to_string(), |c| c.to_string())));
        v.push(("tol", self.tol.to_string()));
        v.push(("measure", self.measure.name().to_string()));
        v.push(("r-grid", format!("{}:{}:{}", self.r_grid.start, self.r_grid.stop, self.r_grid.step)));
        v.push(("source", self.source.name().to_string()));
        v.push(("normalize", self.normalize.to_string()));
        v.push(("transmittance", self.transmittance.to_string()));
        v
    }
}
