//! Non-clinical image statistics used to compare companded output with
//! window renders.

use crate::error::{Error, Result};
use crate::slice::LdrImage;

/// Axis-aligned rectangle in pixel coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roi {
    pub name: String,
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Roi {
    pub fn new(name: impl Into<String>, x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { name: name.into(), x, y, w, h }
    }

    pub fn check_bounds(&self, width: usize, height: usize) -> Result<()> {
        if self.w == 0 || self.h == 0 {
            return Err(Error::Shape(format!("ROI `{}` is empty", self.name)));
        }
        if self.x + self.w > width || self.y + self.h > height {
            return Err(Error::Shape(format!(
                "ROI `{}` ({} {} {} {}) exceeds {width}x{height}",
                self.name, self.x, self.y, self.w, self.h
            )));
        }
        Ok(())
    }

    fn pixels<'a>(&'a self, img: &'a LdrImage) -> impl Iterator<Item = u16> + 'a {
        (self.y..self.y + self.h).flat_map(move |y| (self.x..self.x + self.w).map(move |x| img.get(x, y)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContrastMetrics {
    /// Population standard deviation over mean (0 when the mean is 0).
    pub rms_contrast: f64,
    /// Shannon entropy in bits of a 256-bin histogram.
    pub entropy: f64,
    /// `max - min` in gray levels of the image's own bit depth.
    pub dynamic_range: u16,
}

pub fn contrast_metrics(img: &LdrImage, roi: &Roi) -> Result<ContrastMetrics> {
    roi.check_bounds(img.width(), img.height())?;
    let n = (roi.w * roi.h) as f64;
    let shift = img.bit_depth().bits() - 8;

    let mut hist = [0u64; 256];
    let (mut sum, mut min, mut max) = (0.0, u16::MAX, 0u16);
    for v in roi.pixels(img) {
        hist[(v >> shift) as usize] += 1;
        sum += v as f64;
        min = min.min(v);
        max = max.max(v);
    }
    let mean = sum / n;
    let var = roi.pixels(img).map(|v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
    let rms_contrast = if mean > 0.0 { var.sqrt() / mean } else { 0.0 };
    let entropy = hist
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0);
    Ok(ContrastMetrics { rms_contrast, entropy, dynamic_range: max - min })
}

/// Mean forward-difference gradient magnitude inside the ROI, with gray
/// values scaled to `[0, 1]`.
pub fn edge_gradient(img: &LdrImage, roi: &Roi) -> Result<f64> {
    roi.check_bounds(img.width(), img.height())?;
    if roi.w < 2 || roi.h < 2 {
        return Err(Error::Shape(format!("ROI `{}` too small for gradients", roi.name)));
    }
    let scale = img.bit_depth().max_value() as f64;
    let at = |x: usize, y: usize| img.get(x, y) as f64 / scale;
    let mut total = 0.0;
    for y in roi.y..roi.y + roi.h - 1 {
        for x in roi.x..roi.x + roi.w - 1 {
            let dx = at(x + 1, y) - at(x, y);
            let dy = at(x, y + 1) - at(x, y);
            total += (dx * dx + dy * dy).sqrt();
        }
    }
    Ok(total / ((roi.w - 1) * (roi.h - 1)) as f64)
}
