//! Observation ingest and small CSV helpers.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use sspe::io::fmt_f64;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("no observations")]
    NoObservations,
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: gap in t (expected {expected}, found {found})")]
    Gap { line: u64, expected: u64, found: u64 },
    #[error("header must be `t,y` or `t,x,y`, found `{0}`")]
    Header(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads observations from CSV `t,y` (or a trajectory `t,x,y`). Times must
/// run `0, 1, 2, ...` without gaps.
pub fn read_observations<R: Read>(reader: R) -> Result<Vec<f64>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    let names: Vec<&str> = header.iter().collect();
    let y_col = match names.as_slice() {
        ["t", "y"] => 1,
        ["t", "x", "y"] => 2,
        [] | [""] => return Err(DataError::NoObservations),
        _ => return Err(DataError::Header(names.join(","))),
    };
    let mut y = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(e, 0))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let t: u64 = rec[0]
            .parse()
            .map_err(|_| DataError::Malformed { line, message: format!("bad time index `{}`", &rec[0]) })?;
        let expected = y.len() as u64;
        if t != expected {
            return Err(DataError::Gap { line, expected, found: t });
        }
        let v: f64 = rec[y_col]
            .parse()
            .map_err(|_| DataError::Malformed { line, message: format!("bad value `{}`", &rec[y_col]) })?;
        if !v.is_finite() {
            return Err(DataError::Malformed { line, message: format!("non-finite value `{}`", &rec[y_col]) });
        }
        y.push(v);
    }
    if y.is_empty() {
        return Err(DataError::NoObservations);
    }
    Ok(y)
}

fn csv_error(e: csv::Error, fallback_line: u64) -> DataError {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => DataError::Io(io),
        kind => DataError::Malformed { line, message: format!("{kind:?}") },
    }
}

pub fn read_observations_file(path: &Path) -> Result<Vec<f64>, DataError> {
    read_observations(File::open(path)?)
}

/// Writes CSV `t,y` with 17 significant digits.
pub fn write_observations<W: Write>(mut w: W, y: &[f64]) -> std::io::Result<()> {
    writeln!(w, "t,y")?;
    for (t, v) in y.iter().enumerate() {
        writeln!(w, "{t},{}", fmt_f64(*v))?;
    }
    Ok(())
}

/// Creates `path` (and its parent directories) and hands a buffered writer to `f`.
pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()
}

/// Formats a float for a CSV cell.
pub fn num(v: f64) -> String {
    fmt_f64(v)
}
