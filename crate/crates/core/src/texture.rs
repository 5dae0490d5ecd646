//! Texture-contrast pyramid: per-level difference-of-Gaussians magnitudes
//! raised to a power and blended with the expanded coarser texture level.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::CompandParams;
use crate::pyramid::{expand_to, Kernel, Pyramid};

/// `|B_n - expand(B_{n+1})|` for `n` in `0..=N`.
pub fn dog_magnitudes(gauss: &Pyramid, kernel: &Kernel) -> Result<Vec<Grid>> {
    gauss
        .levels()
        .windows(2)
        .map(|pair| {
            let e = expand_to(&pair[1], &pair[0], kernel)?;
            Ok(pair[0].zip_map(&e, |b, e| (b - e).abs()))
        })
        .collect()
}

/// Texture levels `S_0..=S_N`.
///
/// The coarsest level is the plain power-law DoG magnitude. Each finer level
/// blends its own magnitude (weight `w_n[n]`) with the expanded coarser
/// texture (weight `1 - w_n[n]`), so `S_n` accumulates context from every
/// level at or below its resolution.
pub fn build_sorf_pyramid(gauss: &Pyramid, w_n: &[f64], mu: f64, kernel: &Kernel) -> Result<Pyramid> {
    if gauss.len() < 2 {
        return Err(Error::Shape("texture pyramid needs at least two Gaussian levels".into()));
    }
    let depth = gauss.len() - 2;
    if w_n.len() != depth {
        return Err(Error::Shape(format!("texture weights: expected {depth} entries, got {}", w_n.len())));
    }
    if !(mu > 0.0) {
        return Err(Error::Param(format!("mu must be positive, got {mu}")));
    }

    let dogs = dog_magnitudes(gauss, kernel)?;
    let mut levels = vec![dogs[depth].map(|d| d.powf(mu))];
    for n in (0..depth).rev() {
        let coarser = levels.last().expect("seeded");
        let ctx = expand_to(coarser, &dogs[n], kernel)?;
        let w = w_n[n];
        // Expansion can undershoot when the kernel has negative side taps.
        levels.push(dogs[n].zip_map(&ctx, |d, c| w * d.powf(mu) + (1.0 - w) * c.max(0.0)));
    }
    levels.reverse();
    Pyramid::new(levels)
}

/// [`build_sorf_pyramid`] with the weights, exponent and kernel from `p`.
pub fn sorf_pyramid(gauss: &Pyramid, p: &CompandParams) -> Result<Pyramid> {
    build_sorf_pyramid(gauss, &p.w_n, p.mu, &Kernel::new(p.kernel_a)?)
}
