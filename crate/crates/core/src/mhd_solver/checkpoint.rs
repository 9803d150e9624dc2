use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use crate::error::{Error, Result};
use crate::spectral_core::{Spectral, SpectralField, StatePair, VectorField};

pub const LAYOUT: &str = "u_x,u_y,b_x,b_y; index ix*n+iy; complex as (re,im) f64 pairs";
pub const BYTE_ORDER: &str = "little-endian";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub n_modes: usize,
    pub period: f64,
    pub time: f64,
    pub config: SolverConfig,
    pub layout: String,
    pub byte_order: String,
    /// Coefficient file, relative to the header's directory.
    pub data_file: String,
    pub values: usize,
}

/// Writes `<stem>.json` and `<stem>.bin`; returns the header path.
pub fn write_checkpoint(
    stem: &Path,
    cfg: &SolverConfig,
    time: f64,
    state: &StatePair,
) -> Result<PathBuf> {
    let grid = state.grid();
    let json = stem.with_extension("json");
    let bin = stem.with_extension("bin");
    let mut bytes = Vec::with_capacity(4 * grid.len() * 16);
    for comp in state.components() {
        for c in comp {
            bytes.extend_from_slice(&c.re.to_le_bytes());
            bytes.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    let header = CheckpointHeader {
        format_version: 1,
        n_modes: grid.n_modes(),
        period: grid.period(),
        time,
        config: cfg.clone(),
        layout: LAYOUT.into(),
        byte_order: BYTE_ORDER.into(),
        data_file: bin
            .file_name()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidParameter("checkpoint stem needs a file name".into()))?
            .to_string(),
        values: 8 * grid.len(),
    };
    fs::write(&bin, bytes)?;
    fs::write(&json, serde_json::to_string_pretty(&header)?)?;
    Ok(json)
}

/// Reads a checkpoint given its header path.
pub fn read_checkpoint(header_path: &Path) -> Result<(CheckpointHeader, StatePair)> {
    let header: CheckpointHeader = serde_json::from_str(&fs::read_to_string(header_path)?)?;
    if header.byte_order != BYTE_ORDER || header.layout != LAYOUT {
        return Err(Error::InvalidParameter(
            "unsupported checkpoint layout".into(),
        ));
    }
    let grid = crate::Grid::new(header.n_modes, header.period)?;
    let dir = header_path.parent().unwrap_or_else(|| Path::new("."));
    let bytes = fs::read(dir.join(&header.data_file))?;
    let expected = 8 * grid.len();
    if header.values != expected || bytes.len() != expected * 8 {
        return Err(Error::SizeMismatch {
            expected: expected * 8,
            found: bytes.len(),
        });
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect();
    let comp = |i: usize| -> Result<SpectralField> {
        let start = 2 * i * grid.len();
        let coeffs = values[start..start + 2 * grid.len()]
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        SpectralField::from_coeffs(&grid, coeffs)
    };
    let state = StatePair::new(
        VectorField::new(comp(0)?, comp(1)?)?,
        VectorField::new(comp(2)?, comp(3)?)?,
    )?;
    Ok((header, state))
}
