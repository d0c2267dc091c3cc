//! `ising-v1` JSON instance files.
//!
//! ```json
//! { "format": "ising-v1", "n": 2, "linear": [[0, -1.0]],
//!   "quadratic": [[0, 1, 1.0]], "metadata": {} }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{IsingError, Result};
use crate::model::IsingModel;

pub const FORMAT_TAG: &str = "ising-v1";

#[derive(Deserialize)]
struct RawInstance {
    format: String,
    n: usize,
    #[serde(default)]
    linear: Vec<(usize, f64)>,
    #[serde(default)]
    quadratic: Vec<(usize, usize, f64)>,
    #[serde(default)]
    metadata: BTreeMap<String, Value>,
}

fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite coefficient")
}

pub fn to_json_string(model: &IsingModel) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"format\": \"{FORMAT_TAG}\",");
    let _ = writeln!(s, "  \"n\": {},", model.n());
    s.push_str("  \"linear\": [");
    for (k, &(i, h)) in model.linear().iter().enumerate() {
        let sep = if k == 0 { "\n" } else { ",\n" };
        let _ = write!(s, "{sep}    [{i}, {}]", num(h));
    }
    s.push_str(if model.linear().is_empty() { "],\n" } else { "\n  ],\n" });
    s.push_str("  \"quadratic\": [");
    for (k, &(i, j, c)) in model.quadratic().iter().enumerate() {
        let sep = if k == 0 { "\n" } else { ",\n" };
        let _ = write!(s, "{sep}    [{i}, {j}, {}]", num(c));
    }
    s.push_str(if model.quadratic().is_empty() { "],\n" } else { "\n  ],\n" });
    let meta = serde_json::to_string(model.metadata()).expect("metadata is plain JSON");
    let _ = writeln!(s, "  \"metadata\": {meta}");
    s.push_str("}\n");
    s
}

pub fn from_json_str(text: &str, origin: &Path) -> Result<IsingModel> {
    let parse_err = |message: String| IsingError::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    if raw.format != FORMAT_TAG {
        return Err(parse_err(format!(
            "unsupported format '{}' (expected '{FORMAT_TAG}')",
            raw.format
        )));
    }
    for (k, &(i, h)) in raw.linear.iter().enumerate() {
        if i >= raw.n {
            return Err(parse_err(format!(
                "linear[{k}] = [{i}, {h}]: site {i} out of range for n = {}",
                raw.n
            )));
        }
    }
    for (k, &(i, j, c)) in raw.quadratic.iter().enumerate() {
        if let Some(bad) = [i, j].into_iter().find(|&x| x >= raw.n) {
            return Err(parse_err(format!(
                "quadratic[{k}] = [{i}, {j}, {c}]: site {bad} out of range for n = {}",
                raw.n
            )));
        }
        if i == j {
            return Err(parse_err(format!(
                "quadratic[{k}] = [{i}, {j}, {c}]: self-coupling"
            )));
        }
    }
    let mut model = IsingModel::new(raw.n, raw.linear, raw.quadratic)
        .map_err(|e| parse_err(e.to_string()))?;
    *model.metadata_mut() = raw.metadata;
    Ok(model)
}

pub fn write_instance(model: &IsingModel, path: &Path) -> Result<()> {
    std::fs::write(path, to_json_string(model)).map_err(|source| IsingError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_instance(path: &Path) -> Result<IsingModel> {
    let text = std::fs::read_to_string(path).map_err(|source| IsingError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json_str(&text, path)
}
