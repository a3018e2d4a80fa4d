//! Deterministic table and heatmap writers.
//!
//! Floats are written with Rust's shortest round-trip formatting, rows in the
//! order given, LF line endings. Identical inputs give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use tmsv_core::Field2;

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::I(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => v.to_string(),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::I(v) => json!(v),
            Cell::S(s) => json!(s),
        }
    }
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, manifest: &Value) -> String {
        let data: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = json!({ "manifest": manifest, "columns": self.columns, "data": data });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialise");
        s.push('\n');
        s
    }
}

/// How negative values are placed on the gray scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativePolicy {
    /// `[min, max] → [0, 65535]`.
    Linear,
    /// `[−m, m] → [0, 65535]` with `m = max|v|`, so zero is mid-gray.
    Symmetric,
}

const MID_GRAY: u16 = 32768;

/// 16-bit binary PGM, top row = largest `y`.
///
/// The comment line carries `min`/`max` of the field so that values can be
/// recovered; a constant field renders mid-gray and is flagged `degenerate`.
pub fn render_heatmap(field: &Field2<f64>, policy: NegativePolicy) -> Result<Vec<u8>, CliError> {
    if field.values().iter().any(|v| !v.is_finite()) {
        return Err(CliError::Numerical("heatmap: field has non-finite values".into()));
    }
    let (min, max) = (field.min(), field.max());
    let (lo, hi) = match policy {
        NegativePolicy::Linear => (min, max),
        NegativePolicy::Symmetric => {
            let m = min.abs().max(max.abs());
            (-m, m)
        }
    };
    let degenerate = !(hi > lo);
    let g = field.grid();
    let mut header = format!(
        "P5\n# tmsv min={min} max={max} scale={lo}:{hi}{}\n{} {}\n65535\n",
        if degenerate { " degenerate" } else { "" },
        g.nx,
        g.ny
    );
    let mut bytes = std::mem::take(&mut header).into_bytes();
    bytes.reserve(2 * g.len());
    for j in (0..g.ny).rev() {
        for i in 0..g.nx {
            let level = if degenerate {
                MID_GRAY
            } else {
                ((field.get(i, j) - lo) / (hi - lo) * 65535.0).round().clamp(0.0, 65535.0) as u16
            };
            bytes.extend_from_slice(&level.to_be_bytes());
        }
    }
    Ok(bytes)
}

/// Collects every output of one run, then writes the manifest last.
pub struct Writer {
    dir: PathBuf,
    formats: Vec<Format>,
    manifest: Value,
    settings: Map<String, Value>,
    files: Vec<String>,
}

impl Writer {
    /// Creates `dir` if needed and checks that it is writable.
    pub fn new(dir: &Path, formats: &[Format], manifest: Value) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::usage("out", format!("{}: {e}", dir.display())))?;
        let probe = dir.join(".tmsv-write-check");
        fs::write(&probe, b"").map_err(|e| CliError::usage("out", format!("{} is not writable: {e}", dir.display())))?;
        let _ = fs::remove_file(probe);
        Ok(Writer { dir: dir.to_path_buf(), formats: formats.to_vec(), manifest, settings: Map::new(), files: Vec::new() })
    }

    /// Records a numerical setting (cutoff, tolerance, grid) in the manifest.
    pub fn setting(&mut self, key: impl Into<String>, value: Value) {
        self.settings.insert(key.into(), value);
    }

    fn write(&mut self, name: String, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(&name);
        fs::write(&path, bytes).map_err(|e| CliError::usage("out", format!("{}: {e}", path.display())))?;
        self.files.push(name);
        Ok(())
    }

    pub fn table(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        if self.formats.contains(&Format::Csv) {
            self.write(format!("{stem}.csv"), table.to_csv().as_bytes())?;
        }
        if self.formats.contains(&Format::Json) {
            let text = table.to_json(&self.manifest);
            self.write(format!("{stem}.json"), text.as_bytes())?;
        }
        Ok(())
    }

    pub fn heatmap(&mut self, stem: &str, field: &Field2<f64>, policy: NegativePolicy) -> Result<(), CliError> {
        if self.formats.contains(&Format::Pgm) {
            let bytes = render_heatmap(field, policy)?;
            self.write(format!("{stem}.pgm"), &bytes)?;
        }
        Ok(())
    }

    /// Writes `manifest.json` and `manifest.conf`; returns every file
    /// written, manifests included.
    pub fn finish(mut self, conf: &str) -> Result<Vec<PathBuf>, CliError> {
        let mut doc = self.manifest.clone();
        if let Value::Object(m) = &mut doc {
            m.insert("settings".into(), Value::Object(self.settings.clone()));
            m.insert("outputs".into(), json!(self.files));
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("json values serialise");
        text.push('\n');
        self.write("manifest.json".into(), text.as_bytes())?;
        self.write("manifest.conf".into(), conf.as_bytes())?;
        Ok(self.files.iter().map(|f| self.dir.join(f)).collect())
    }
}

/// `(x, y, value)` rows of a field in storage order (x fastest).
pub fn field_table(field: &Field2<f64>, names: [&str; 3]) -> Table {
    let mut t = Table::new(&names);
    for (_, _, x, y, v) in field.iter() {
        t.push(vec![x.into(), y.into(), v.into()]);
    }
    t
}
