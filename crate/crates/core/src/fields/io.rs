//! Field pairs on disk: little-endian `f64` values in row-major order, `u₁`
//! then `u₂`, with a JSON sidecar `{n, extent, components}` next to the
//! binary (same path plus `.json`).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{FieldError, Field2D, Grid2D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSidecar {
    pub n: usize,
    pub extent: f64,
    pub components: usize,
}

pub fn sidecar_path(bin: &Path) -> PathBuf {
    let mut s = bin.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Write `bytes` to a temporary sibling and rename it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

pub fn write_fields(bin: &Path, u1: &Field2D, u2: &Field2D) -> Result<(), FieldError> {
    if u1.grid != u2.grid {
        return Err(FieldError::InvalidInput("components live on different grids".into()));
    }
    let mut bytes = Vec::with_capacity(16 * u1.values.len());
    for u in [u1, u2] {
        for v in u.values.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    atomic_write(bin, &bytes)?;
    let side = FieldSidecar {
        n: u1.grid.n,
        extent: u1.grid.extent,
        components: 2,
    };
    atomic_write(&sidecar_path(bin), serde_json::to_string_pretty(&side)?.as_bytes())?;
    Ok(())
}

pub fn read_fields(bin: &Path) -> Result<(Field2D, Field2D), FieldError> {
    let side: FieldSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(bin))?)?;
    let grid = Grid2D::new(side.n, side.extent)?;
    if side.components != 2 {
        return Err(FieldError::InvalidInput(format!("expected 2 components, sidecar says {}", side.components)));
    }
    let bytes = fs::read(bin)?;
    let per = side.n * side.n;
    if bytes.len() != 16 * per {
        return Err(FieldError::InvalidInput(format!(
            "binary holds {} bytes, expected {}",
            bytes.len(),
            16 * per
        )));
    }
    let mut vals = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let mut take = || Array2::from_shape_fn((side.n, side.n), |_| vals.next().expect("length checked"));
    let a = take();
    let b = take();
    Ok((Field2D::new(grid, a)?, Field2D::new(grid, b)?))
}
