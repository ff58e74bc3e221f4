//! JSON state serialization. Floats are written in shortest round-trip form.

use super::{Cutoff, DensityMatrix, Ket, Modes, State};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Metadata {
    tail_deficit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    kind: String,
    cutoff: usize,
    data: Vec<f64>,
    metadata: Metadata,
}

fn interleave<'a>(it: impl Iterator<Item = &'a C64>) -> Vec<f64> {
    it.flat_map(|z| [z.re, z.im]).collect()
}

/// Serializes a state; `provenance` is an optional free-form tag stored in metadata.
pub fn state_to_json(state: &State, provenance: Option<&str>) -> String {
    let (kind, data) = match state {
        State::Pure(k) => {
            (if k.modes() == Modes::Single { "ket" } else { "two_mode_ket" }, interleave(k.amps().iter()))
        }
        State::Mixed(d) => {
            let e = d.elems();
            let rows = (0..e.nrows()).flat_map(|i| (0..e.ncols()).map(move |j| (i, j)));
            (
                if d.modes() == Modes::Single { "density" } else { "two_mode_density" },
                rows.flat_map(|(i, j)| [e[(i, j)].re, e[(i, j)].im]).collect(),
            )
        }
    };
    let file = StateFile {
        kind: kind.to_string(),
        cutoff: state.cutoff().dim(),
        data,
        metadata: Metadata { tail_deficit: state.tail_deficit(), provenance: provenance.map(str::to_string) },
    };
    serde_json::to_string(&file).expect("state serialization cannot fail")
}

pub fn state_from_json(text: &str) -> Result<State> {
    let f: StateFile = serde_json::from_str(text)?;
    let cutoff = Cutoff::new(f.cutoff)?;
    let (modes, pure) = match f.kind.as_str() {
        "ket" => (Modes::Single, true),
        "two_mode_ket" => (Modes::Two, true),
        "density" => (Modes::Single, false),
        "two_mode_density" => (Modes::Two, false),
        other => return Err(Error::Data(format!("unknown state kind {other:?}"))),
    };
    let n = modes.space_dim(cutoff);
    let want = if pure { 2 * n } else { 2 * n * n };
    if f.data.len() != want {
        return Err(Error::Data(format!("{} data has {} floats, expected {want}", f.kind, f.data.len())));
    }
    if f.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite value in state data".into()));
    }
    let vals: Vec<C64> = f.data.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    Ok(if pure {
        State::Pure(Ket::from_parts(DVector::from_vec(vals), cutoff, modes, f.metadata.tail_deficit))
    } else {
        State::Mixed(DensityMatrix::from_parts(
            DMatrix::from_row_slice(n, n, &vals),
            cutoff,
            modes,
            f.metadata.tail_deficit,
        ))
    })
}

/// Hex SHA-256 of the canonical serialization (without provenance).
pub fn state_digest(state: &State) -> String {
    hex::encode(Sha256::digest(state_to_json(state, None).as_bytes()))
}
