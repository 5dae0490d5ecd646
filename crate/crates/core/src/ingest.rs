//! Slice loading: raw-float fixtures, uncompressed DICOM, and metal clipping.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::CompandParams;
use crate::slice::HuSlice;

pub mod dicom;

pub use dicom::{load_dicom_slice, parse_dicom, DicomSliceMeta};

/// Leading bytes of a raw-float file.
pub const RAW_MAGIC: &[u8; 8] = b"CTCOMPND";
const RAW_HEADER_LEN: usize = 16;

/// Clamp every value to `[hu_min_clip, hu_max_clip]`.
pub fn clip_metal(slice: &HuSlice, p: &CompandParams) -> HuSlice {
    let (lo, hi) = (p.hu_min_clip, p.hu_max_clip);
    slice.with_values(slice.values().map(|v| v.clamp(lo, hi)))
}

/// Encode a grid as raw-float bytes: magic, `u32` width and height (LE),
/// then row-major `f32` LE samples.
pub fn encode_raw_float(grid: &Grid) -> Result<Vec<u8>> {
    let (w, h) = grid.dims();
    let (w32, h32) = match (u32::try_from(w), u32::try_from(h)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => return Err(Error::Shape(format!("grid {w}x{h} too large for raw-float"))),
    };
    let mut out = Vec::with_capacity(RAW_HEADER_LEN + 4 * w * h);
    out.extend_from_slice(RAW_MAGIC);
    out.extend_from_slice(&w32.to_le_bytes());
    out.extend_from_slice(&h32.to_le_bytes());
    for &v in grid.as_slice() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    Ok(out)
}

pub fn decode_raw_float(bytes: &[u8]) -> Result<Grid> {
    if bytes.len() < RAW_MAGIC.len() || &bytes[..RAW_MAGIC.len()] != RAW_MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < RAW_HEADER_LEN {
        return Err(Error::Truncated { expected: RAW_HEADER_LEN, found: bytes.len() });
    }
    let width = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    let height = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes"));
    let payload = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(RAW_HEADER_LEN))
        .ok_or(Error::DimensionOverflow { width, height })?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("raw-float file has empty dimensions {width}x{height}")));
    }
    if bytes.len() < payload {
        return Err(Error::Truncated { expected: payload, found: bytes.len() });
    }
    if bytes.len() > payload {
        return Err(Error::Format(format!("raw-float file has {} trailing bytes", bytes.len() - payload)));
    }
    let data = bytes[RAW_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
        .collect();
    Grid::new(width as usize, height as usize, data)
}

pub fn save_raw_float(path: impl AsRef<Path>, grid: &Grid) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_raw_float(grid)?).map_err(|e| Error::io(path, e))
}

/// Load a raw-float file as a slice with unit pixel spacing.
pub fn load_raw_float(path: impl AsRef<Path>) -> Result<HuSlice> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    HuSlice::new(decode_raw_float(&bytes)?, (1.0, 1.0), source_id(path))
}

/// Load either format, chosen by the raw-float magic number.
pub fn load_slice(path: impl AsRef<Path>) -> Result<HuSlice> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(RAW_MAGIC) {
        HuSlice::new(decode_raw_float(&bytes)?, (1.0, 1.0), source_id(path))
    } else {
        Ok(parse_dicom(&bytes, &source_id(path))?.0)
    }
}

pub(crate) fn source_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}
