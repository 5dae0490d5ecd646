//! Soft-tissue enhancement applied before companding (CT mode only).
//!
//! A piecewise-parabolic weight of the intensity scales a surround-minus-
//! center deviation signal. The weight is negative below the turnover `V`,
//! so soft-tissue pixels are pushed away from their neighborhood (local
//! contrast grows); above `V` it is positive and bone pixels are pulled
//! towards it, leaving bone contrast to the companding stage.

use crate::error::{Error, Result};
use crate::grid::{fill_rows, mirror, Grid};
use crate::params::CompandParams;

/// Enhancement weight at a single normalized intensity (`I_max = 1`).
#[inline]
pub fn weight(u: f64, v: f64, c1: f64, c2: f64) -> f64 {
    if u >= v {
        4.0 * c1 * (u - v) * (1.0 - u) / ((1.0 - v) * (1.0 - v))
    } else {
        -4.0 * c2 * (v - u) * u / (3.0 * v * v)
    }
}

pub fn weight_field(u: &Grid, p: &CompandParams) -> Result<Grid> {
    if !(p.v > 0.0 && p.v < 1.0) {
        return Err(Error::Param(format!("v must lie in (0, 1), got {}", p.v)));
    }
    Ok(u.map(|x| weight(x, p.v, p.c1, p.c2)))
}

/// Normalized 1D Gaussian with `sigma = radius / 2`, truncated at `radius`.
pub fn surround_kernel(radius: usize) -> Vec<f64> {
    let sigma = radius as f64 / 2.0;
    let r = radius as isize;
    let raw: Vec<f64> = (-r..=r).map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|k| k / sum).collect()
}

/// Separable truncated Gaussian blur with mirror borders.
pub fn gaussian_blur(u: &Grid, radius: usize) -> Grid {
    let (w, h) = u.dims();
    let kernel = surround_kernel(radius);
    let r = radius as isize;

    let mut horiz = vec![0.0; w * h];
    fill_rows(&mut horiz, w, |y, out| {
        let row = u.row(y);
        for (x, o) in out.iter_mut().enumerate() {
            *o = kernel.iter().zip(-r..=r).map(|(k, d)| k * row[mirror(x as isize + d, w)]).sum();
        }
    });

    let mut data = vec![0.0; w * h];
    fill_rows(&mut data, w, |y, out| {
        for (k, d) in kernel.iter().zip(-r..=r) {
            let src = &horiz[mirror(y as isize + d, h) * w..][..w];
            for (o, s) in out.iter_mut().zip(src) {
                *o += k * s;
            }
        }
    });
    Grid::new(w, h, data).expect("blur preserves shape")
}

/// Gaussian surround minus center.
pub fn surround_signal(u: &Grid, p: &CompandParams) -> Result<Grid> {
    if p.srnd_radius == 0 {
        return Err(Error::Param("srnd_radius must be at least 1".into()));
    }
    let blurred = gaussian_blur(u, p.srnd_radius);
    Ok(u.zip_map(&blurred, |c, s| s - c))
}

const FLAT_TOLERANCE: f64 = 1e-12;

/// `u + W * G / max|G|`, re-clamped to `[epsilon, 1]`. Flat inputs are
/// returned unchanged.
pub fn soft_tissue_enhance(u: &Grid, p: &CompandParams) -> Result<Grid> {
    let w = weight_field(u, p)?;
    let g = surround_signal(u, p)?;
    let scale = g.max_abs();
    // Blur roundoff on flat input leaves deviations of order 1e-17.
    if scale <= FLAT_TOLERANCE {
        return Ok(u.clone());
    }
    let mut out = u.clone();
    for ((o, wv), gv) in out.as_mut_slice().iter_mut().zip(w.as_slice()).zip(g.as_slice()) {
        *o = (*o + wv * gv / scale).clamp(p.epsilon, 1.0);
    }
    Ok(out)
}
