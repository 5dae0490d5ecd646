//! Input slices, display images, window presets, and the affine intensity
//! normalization the pyramid stages run on.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::CompandParams;

/// Smallest slice edge accepted by the pipeline.
pub const MIN_SLICE_DIM: usize = 16;

/// 2D grid of Hounsfield-unit values with acquisition metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct HuSlice {
    values: Grid,
    /// (row, column) spacing in millimetres.
    pub pixel_spacing_mm: (f64, f64),
    pub source_id: String,
}

impl HuSlice {
    pub fn new(values: Grid, pixel_spacing_mm: (f64, f64), source_id: impl Into<String>) -> Result<Self> {
        let (w, h) = values.dims();
        if w < MIN_SLICE_DIM || h < MIN_SLICE_DIM {
            return Err(Error::Shape(format!("slice {w}x{h} is smaller than {MIN_SLICE_DIM}x{MIN_SLICE_DIM}")));
        }
        if !values.all_finite() {
            return Err(Error::Degenerate("slice contains non-finite values".into()));
        }
        Ok(Self { values, pixel_spacing_mm, source_id: source_id.into() })
    }

    pub fn values(&self) -> &Grid {
        &self.values
    }

    pub fn width(&self) -> usize {
        self.values.width()
    }

    pub fn height(&self) -> usize {
        self.values.height()
    }

    /// Same metadata, new values.
    pub(crate) fn with_values(&self, values: Grid) -> Self {
        Self { values, pixel_spacing_mm: self.pixel_spacing_mm, source_id: self.source_id.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    pub fn max_value(self) -> u16 {
        match self {
            BitDepth::Eight => u8::MAX as u16,
            BitDepth::Sixteen => u16::MAX,
        }
    }

    pub fn mid_gray(self) -> u16 {
        1 << (self.bits() - 1)
    }
}

impl TryFrom<u32> for BitDepth {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(Error::Param(format!("bit depth must be 8 or 16, got {other}"))),
        }
    }
}

/// Quantized display image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdrImage {
    width: usize,
    height: usize,
    values: Vec<u16>,
    bit_depth: BitDepth,
}

impl LdrImage {
    pub fn new(width: usize, height: usize, values: Vec<u16>, bit_depth: BitDepth) -> Result<Self> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(Error::Shape(format!("LDR image {width}x{height} with {} values", values.len())));
        }
        if let Some(v) = values.iter().find(|&&v| v > bit_depth.max_value()) {
            return Err(Error::Shape(format!("value {v} exceeds {}-bit range", bit_depth.bits())));
        }
        Ok(Self { width, height, values, bit_depth })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> BitDepth {
        self.bit_depth
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }
}

/// Window level and width in HU.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSpec {
    pub level: f64,
    pub width: f64,
    pub name: String,
}

impl WindowSpec {
    pub fn new(level: f64, width: f64, name: impl Into<String>) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && level.is_finite()) {
            return Err(Error::Param(format!("window width must be positive and finite, got {width}")));
        }
        Ok(Self { level, width, name: name.into() })
    }

    /// Radiological convention, level 400 / width 1800.
    pub fn bone() -> Self {
        Self { level: 400.0, width: 1800.0, name: "bone".into() }
    }

    /// Radiological convention, level 50 / width 400.
    pub fn soft() -> Self {
        Self { level: 50.0, width: 400.0, name: "soft".into() }
    }

    /// Radiological convention, level -600 / width 1500.
    pub fn lung() -> Self {
        Self { level: -600.0, width: 1500.0, name: "lung".into() }
    }

    pub fn presets() -> [WindowSpec; 3] {
        [Self::bone(), Self::soft(), Self::lung()]
    }

    pub fn preset(name: &str) -> Option<Self> {
        Self::presets().into_iter().find(|w| w.name.eq_ignore_ascii_case(name))
    }
}

/// Affine map from raw values to the unit interval, floored at `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalization {
    pub lo: f64,
    pub hi: f64,
    pub epsilon: f64,
}

impl Normalization {
    pub fn new(lo: f64, hi: f64, epsilon: f64) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Param(format!("degenerate normalization range [{lo}, {hi}]")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Param(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self { lo, hi, epsilon })
    }

    /// Bounds from the HU clip range of `p`.
    pub fn from_params(p: &CompandParams) -> Result<Self> {
        Self::new(p.hu_min_clip, p.hu_max_clip, p.epsilon)
    }

    #[inline]
    pub fn apply(&self, value: f64) -> f64 {
        ((value - self.lo) / (self.hi - self.lo)).max(self.epsilon)
    }

    /// Inverse of [`apply`](Self::apply) above the epsilon floor.
    #[inline]
    pub fn invert(&self, unit: f64) -> f64 {
        self.lo + unit * (self.hi - self.lo)
    }

    pub fn apply_grid(&self, grid: &Grid) -> Grid {
        grid.map(|v| self.apply(v))
    }
}

/// Map a clipped slice to `[epsilon, 1]` using the HU clip bounds.
pub fn normalize_to_unit(slice: &HuSlice, p: &CompandParams) -> Result<(Grid, Normalization)> {
    let norm = Normalization::from_params(p)?;
    Ok((norm.apply_grid(slice.values()), norm))
}
