//! Display images: the companding pipeline, window-setting baselines and
//! output quantization.

use crate::enhance::soft_tissue_enhance;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ingest::clip_metal;
use crate::modulate::{modulation_stages, ModulationStages};
use crate::params::{CompandParams, Mode};
use crate::pyramid::{build_contrast_pyramid, build_gaussian_pyramid, collapse, Kernel, Pyramid};
use crate::slice::{normalize_to_unit, BitDepth, HuSlice, LdrImage, Normalization, WindowSpec};
use crate::texture::sorf_pyramid;

pub mod metrics;
pub mod png;

pub use metrics::{contrast_metrics, edge_gradient, ContrastMetrics, Roi};

/// Linear window mapping of HU values onto the full gray range.
pub fn window_render(slice: &HuSlice, window: &WindowSpec, depth: BitDepth) -> LdrImage {
    let lo = window.level - window.width / 2.0;
    let max = depth.max_value() as f64;
    let values = slice
        .values()
        .as_slice()
        .iter()
        .map(|&hu| (((hu - lo) / window.width).clamp(0.0, 1.0) * max).round() as u16)
        .collect();
    LdrImage::new(slice.width(), slice.height(), values, depth).expect("window output in range")
}

/// Result of the percentile stretch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quantized {
    pub image: LdrImage,
    /// Set when the percentile window collapsed and the output is flat
    /// mid-gray.
    pub degenerate: bool,
}

/// Nearest-rank percentile (`round(pct / 100 * (n - 1))` into the sorted
/// values).
pub fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let idx = ((pct / 100.0) * (sorted.len() - 1) as f64).round() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

/// Stretch `[P_lo, P_hi]` linearly onto `[0, 2^depth - 1]`, clamping outside.
pub fn quantize_output(grid: &Grid, depth: BitDepth, lo_pct: f64, hi_pct: f64) -> Result<Quantized> {
    if !(0.0 <= lo_pct && lo_pct < hi_pct && hi_pct <= 100.0) {
        return Err(Error::Param(format!("invalid percentiles {lo_pct}..{hi_pct}")));
    }
    if !grid.all_finite() {
        return Err(Error::Degenerate("cannot quantize non-finite values".into()));
    }
    let mut sorted = grid.as_slice().to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = percentile(&sorted, lo_pct);
    let hi = percentile(&sorted, hi_pct);
    let (w, h) = grid.dims();
    if !(hi > lo) {
        let image = LdrImage::new(w, h, vec![depth.mid_gray(); w * h], depth)?;
        return Ok(Quantized { image, degenerate: true });
    }
    let max = depth.max_value() as f64;
    let values =
        grid.as_slice().iter().map(|&v| (((v - lo) / (hi - lo)).clamp(0.0, 1.0) * max).round() as u16).collect();
    Ok(Quantized { image: LdrImage::new(w, h, values, depth)?, degenerate: false })
}

/// Every intermediate product of one companding run.
#[derive(Clone, Debug)]
pub struct CompandStages {
    pub normalization: Normalization,
    pub normalized: Grid,
    /// Equal to `normalized` in natural mode.
    pub enhanced: Grid,
    pub gauss: Pyramid,
    pub contrast: Pyramid,
    pub texture: Pyramid,
    pub modulation: ModulationStages,
    pub teeth_level: usize,
    /// Collapsed output on the unit scale, before quantization.
    pub output: Grid,
}

/// Run the pipeline up to (not including) quantization.
pub fn compand_stages(slice: &HuSlice, p: &CompandParams) -> Result<CompandStages> {
    p.validate()?;
    let kernel = Kernel::new(p.kernel_a)?;

    let (normalized, normalization) = match p.mode {
        Mode::Ct => normalize_to_unit(&clip_metal(slice, p), p)?,
        Mode::Natural => {
            let (lo, hi) = (slice.values().min(), slice.values().max());
            let hi = if hi > lo { hi } else { lo + 1.0 };
            let norm = Normalization::new(lo, hi, p.epsilon)?;
            (norm.apply_grid(slice.values()), norm)
        }
    };
    let enhanced = match p.mode {
        Mode::Ct => soft_tissue_enhance(&normalized, p)?,
        Mode::Natural => normalized.clone(),
    };

    let gauss = build_gaussian_pyramid(&enhanced, p.levels, &kernel)?;
    let contrast = build_contrast_pyramid(&gauss, &kernel, p.epsilon)?;
    let texture = sorf_pyramid(&gauss, p)?;
    let teeth_level = p.resolve_teeth_level(slice.pixel_spacing_mm);
    let modulation = modulation_stages(&contrast, &texture, &gauss, p, teeth_level)?;
    let output = collapse(&modulation.modulated, &gauss, &kernel)?;

    Ok(CompandStages { normalization, normalized, enhanced, gauss, contrast, texture, modulation, teeth_level, output })
}

/// Compand a slice into a display image.
pub fn compand(slice: &HuSlice, p: &CompandParams, depth: BitDepth) -> Result<LdrImage> {
    let stages = compand_stages(slice, p)?;
    Ok(quantize_output(&stages.output, depth, p.lo_pct, p.hi_pct)?.image)
}
