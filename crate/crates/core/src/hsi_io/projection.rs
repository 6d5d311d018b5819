//! Text format for projection matrices: a `p 3` line, then one row per band.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::ProjectionMatrix;
use crate::error::{Error, Result};

/// Seventeen significant digits, enough to round-trip any f64.
pub(crate) fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_projection(projection: &ProjectionMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let w = projection.weights();
    let mut text = format!("{} 3\n", w.nrows());
    for row in w.row_iter() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_full(v)).collect();
        writeln!(text, "{}", cells.join(" ")).expect("writing to a String");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_projection(path: impl AsRef<Path>) -> Result<ProjectionMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = lines.next().ok_or_else(|| Error::format(path, "empty projection file"))?;
    let dims: Vec<&str> = head.split_whitespace().collect();
    let p = match dims.as_slice() {
        [p, "3"] => p.parse::<usize>().ok().filter(|p| *p > 0),
        _ => None,
    }
    .ok_or_else(|| Error::format(path, format!("bad projection header `{head}`, expected `p 3`")))?;

    let mut values = Vec::with_capacity(3 * p);
    for (row, line) in lines.by_ref().take(p).enumerate() {
        let cells: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::format(path, format!("row {row}: unparsable value in `{line}`")))?;
        if cells.len() != 3 {
            return Err(Error::format(path, format!("row {row}: expected 3 values, got {}", cells.len())));
        }
        values.extend(cells);
    }
    if values.len() != 3 * p {
        return Err(Error::format(path, format!("expected {p} rows, got {}", values.len() / 3)));
    }
    if lines.next().is_some() {
        return Err(Error::format(path, format!("trailing data after {p} rows")));
    }
    ProjectionMatrix::new(DMatrix::from_row_slice(p, 3, &values))
}
