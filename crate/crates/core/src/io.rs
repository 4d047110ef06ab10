//! Binary field output: little-endian `f64` (re, im) pairs, row-major, with a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::HalfGrid;

/// Layout of a binary field file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub dim: usize,
    /// Tangential points per axis.
    #[serde(rename = "M")]
    pub m: usize,
    /// Normal nodes.
    #[serde(rename = "L")]
    pub l: usize,
    pub depth: f64,
    pub period: f64,
    /// Component names in storage order.
    pub components: Vec<String>,
}

impl Sidecar {
    pub fn for_grid(grid: &HalfGrid, components: &[&str]) -> Self {
        Self {
            dim: grid.dim(),
            m: grid.tangential.points,
            l: grid.normal_count(),
            depth: grid.depth,
            period: grid.tangential.period(),
            components: components.iter().map(|c| c.to_string()).collect(),
        }
    }

    fn component_len(&self) -> usize {
        self.m.pow((self.dim - 1) as u32) * self.l
    }
}

/// Writes `<stem>.bin` and `<stem>.json` under `dir`; returns the binary path.
pub fn write_fields(dir: &Path, stem: &str, sidecar: &Sidecar, fields: &[Vec<Complex64>]) -> Result<PathBuf> {
    if fields.len() != sidecar.components.len() || fields.iter().any(|f| f.len() != sidecar.component_len()) {
        return Err(Error::GridMismatch("field lengths disagree with the sidecar".into()));
    }
    fs::create_dir_all(dir)?;
    let mut bytes = Vec::with_capacity(16 * sidecar.component_len() * fields.len());
    for v in fields.iter().flatten() {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    let bin = dir.join(format!("{stem}.bin"));
    fs::write(&bin, bytes)?;
    let json = serde_json::to_string_pretty(sidecar).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join(format!("{stem}.json")), json)?;
    Ok(bin)
}

/// Reads a field file written by [`write_fields`].
pub fn read_fields(dir: &Path, stem: &str) -> Result<(Sidecar, Vec<Vec<Complex64>>)> {
    let text = fs::read_to_string(dir.join(format!("{stem}.json")))?;
    let sidecar: Sidecar = serde_json::from_str(&text).map_err(|e| Error::Io(e.to_string()))?;
    let bytes = fs::read(dir.join(format!("{stem}.bin")))?;
    let n = sidecar.component_len();
    if bytes.len() != 16 * n * sidecar.components.len() {
        return Err(Error::GridMismatch("binary size disagrees with the sidecar".into()));
    }
    let values: Vec<Complex64> = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok((sidecar, values.chunks(n.max(1)).map(|c| c.to_vec()).collect()))
}
