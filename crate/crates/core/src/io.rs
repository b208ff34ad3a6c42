//! Config files, CSV series, binary field snapshots and run manifests.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;
use crate::spectral::{Field, GridSpec};

pub const SNAPSHOT_MAGIC: &[u8; 5] = b"RBOF1";

/// Read, parse and validate an experiment config.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text).map_err(|e| match e {
        Error::ConfigSyntax { message, .. } => Error::ConfigSyntax {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::ConfigSyntax {
        path: PathBuf::from("<string>"),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    toml::to_string(cfg).expect("config types serialize to TOML")
}

/// Decimal text with 17 significant digits, enough to round-trip any f64.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A table of named columns, one row per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn write_series(path: impl AsRef<Path>, series: &Series) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(&series.columns).map_err(csv_err)?;
    for row in &series.rows {
        w.write_record(row.iter().map(|&x| format_f64(x)))
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_series(path: impl AsRef<Path>) -> Result<Series> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let columns: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|e| Error::Format {
                    path: path.to_path_buf(),
                    reason: format!("bad number {s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Series {
        name,
        columns,
        rows,
    })
}

/// Write `RBOF1 | n: u64 | L: f64 | n x f64`, all little-endian.
pub fn snapshot_save(path: impl AsRef<Path>, field: &Field) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let grid = field.grid();
    let write =
        |w: &mut BufWriter<File>, bytes: &[u8]| w.write_all(bytes).map_err(|e| Error::io(path, e));
    write(&mut w, SNAPSHOT_MAGIC)?;
    write(&mut w, &(grid.n() as u64).to_le_bytes())?;
    write(&mut w, &grid.length().to_le_bytes())?;
    for v in field.values() {
        write(&mut w, &v.to_le_bytes())?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn snapshot_load(path: impl AsRef<Path>) -> Result<Field> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let bad = |reason: &str| Error::Format {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)
        .map_err(|_| bad("truncated header"))?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(bad("missing RBOF1 magic"));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)
        .map_err(|_| bad("truncated header"))?;
    let n = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)
        .map_err(|_| bad("truncated header"))?;
    let length = f64::from_le_bytes(word);
    let grid = GridSpec::new(n, length).map_err(|e| bad(&e.to_string()))?;
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut word)
            .map_err(|_| bad("truncated samples"))?;
        values.push(f64::from_le_bytes(word));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest).map_err(|e| Error::io(path, e))?;
    if !rest.is_empty() {
        return Err(bad("trailing bytes after samples"));
    }
    Field::from_values(&grid, values)
}

/// Record of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<ExperimentConfig>,
    pub artifacts: Vec<PathBuf>,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
    pub finished_unix_seconds: u64,
}

impl RunManifest {
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
