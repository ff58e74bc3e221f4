//! Grid export: CSV rows `x,y,value` with `x = 2 Re(alpha)`, `y = 2 Im(alpha)` and a JSON sidecar.

use super::{OrderingParam, PhaseGrid, QuasiProbGrid};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

pub const GRID_FORMAT: &str = "qoptics-grid/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSidecar {
    pub format: String,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub points: usize,
    pub ordering: f64,
    pub state_digest: String,
    /// Coordinates of the CSV columns and the density normalization.
    pub coordinates: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_digest: Option<String>,
}

impl GridSidecar {
    pub fn for_grid(w: &QuasiProbGrid, state_digest: &str) -> Self {
        GridSidecar {
            format: GRID_FORMAT.into(),
            half_width: w.grid().half_width(),
            points: w.grid().points(),
            ordering: w.ordering().value(),
            state_digest: state_digest.into(),
            coordinates: "x = 2 Re(alpha), y = 2 Im(alpha); value per d^2 alpha".into(),
            config_digest: None,
        }
    }
}

pub fn write_grid_csv<W: Write>(w: &QuasiProbGrid, mut out: W) -> Result<()> {
    writeln!(out, "x,y,value")?;
    let axis = w.grid().axis_values();
    for (i, a) in axis.iter().enumerate() {
        for (j, b) in axis.iter().enumerate() {
            writeln!(out, "{},{},{}", 2.0 * a, 2.0 * b, w.values()[(i, j)])?;
        }
    }
    Ok(())
}

/// Reads a grid written by [`write_grid_csv`] together with its sidecar, skipping leading
/// `#` comment lines.
pub fn read_grid_csv<R: BufRead>(input: R, sidecar: &GridSidecar) -> Result<QuasiProbGrid> {
    let grid = PhaseGrid::new(sidecar.half_width, sidecar.points)?;
    let n = grid.points();
    // leading `#` lines are provenance comments
    let mut lines = input.lines().skip_while(|l| l.as_ref().is_ok_and(|l| l.starts_with('#')));
    match lines.next() {
        Some(Ok(h)) if h.trim() == "x,y,value" => {}
        _ => return Err(Error::Data("grid CSV must start with header x,y,value".into())),
    }
    let mut vals = Vec::with_capacity(n * n);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let last = line.rsplit(',').next().ok_or_else(|| Error::Data(format!("bad grid row {line:?}")))?;
        vals.push(last.parse::<f64>().map_err(|e| Error::Data(format!("bad value in {line:?}: {e}")))?);
    }
    if vals.len() != n * n {
        return Err(Error::Data(format!("grid CSV has {} rows, expected {}", vals.len(), n * n)));
    }
    QuasiProbGrid::new(DMatrix::from_row_slice(n, n, &vals), grid, OrderingParam::new(sidecar.ordering)?)
}
