//! Field snapshot files: raw little-endian `f64` values plus a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid1D;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub n_points: usize,
    pub length: f64,
    pub x_left: f64,
    pub time: f64,
}

/// Paths of the data file and sidecar for a stem such as `snapshots/0003`.
pub fn snapshot_paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("f64"), stem.with_extension("json"))
}

pub fn encode_values<T: Real>(values: &[T]) -> Vec<u8> {
    values.iter().flat_map(|v| v.as_f64().to_le_bytes()).collect()
}

pub fn decode_values(bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::Format(format!("{} bytes is not a whole number of f64", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

pub fn write_snapshot<T: Real>(stem: &Path, field: &Field<T>, time: f64) -> Result<()> {
    let (data, sidecar) = snapshot_paths(stem);
    let g = field.grid();
    let meta = SnapshotMeta {
        n_points: g.n_points(),
        length: g.length().as_f64(),
        x_left: g.x_left().as_f64(),
        time,
    };
    fs::write(data, encode_values(field.values()))?;
    fs::write(sidecar, serde_json::to_vec_pretty(&meta)?)?;
    Ok(())
}

pub fn read_meta(stem: &Path) -> Result<SnapshotMeta> {
    let (_, sidecar) = snapshot_paths(stem);
    Ok(serde_json::from_slice(&fs::read(sidecar)?)?)
}

/// Reads a snapshot onto `grid`, which must match the sidecar.
pub fn read_snapshot_on<T: Real>(stem: &Path, grid: &Grid1D<T>) -> Result<(Field<T>, SnapshotMeta)> {
    let meta = read_meta(stem)?;
    if meta.n_points != grid.n_points()
        || meta.length != grid.length().as_f64()
        || meta.x_left != grid.x_left().as_f64()
    {
        return Err(Error::Format(format!("sidecar {meta:?} does not match grid {grid:?}")));
    }
    let (data, _) = snapshot_paths(stem);
    let values = decode_values(&fs::read(data)?)?;
    if values.len() != meta.n_points {
        return Err(Error::Format(format!(
            "{} values on disk, sidecar says {}",
            values.len(),
            meta.n_points
        )));
    }
    let field = Field::new(grid.clone(), values.into_iter().map(T::of).collect())?;
    Ok((field, meta))
}

/// Reads a snapshot, building the grid from its sidecar.
pub fn read_snapshot<T: Real>(stem: &Path) -> Result<(Field<T>, SnapshotMeta)> {
    let meta = read_meta(stem)?;
    let grid = Grid1D::new(meta.n_points, T::of(meta.length), T::of(meta.x_left))?;
    read_snapshot_on(stem, &grid)
}
