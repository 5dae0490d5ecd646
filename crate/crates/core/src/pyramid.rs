//! Gaussian reduce/expand, the ratio (contrast) pyramid, and multiplicative
//! collapse.
//!
//! All filtering uses the separable 5-tap generating kernel
//! `[1/4 - a/2, 1/4, a, 1/4, 1/4 - a/2]` with mirror borders (see
//! [`grid::mirror`]). Odd sizes reduce to `ceil(d / 2)` and expand back to
//! the recorded parent size, so every pyramid round-trips on any dimensions.

use crate::error::{Error, Result};
use crate::grid::{fill_rows, mirror, Grid};

/// Separable 5-tap generating kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel {
    taps: [f64; 5],
}

impl Kernel {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Param(format!("kernel_a must lie in (0, 1), got {a}")));
        }
        let side = 0.25 - 0.5 * a;
        Ok(Self { taps: [side, 0.25, a, 0.25, side] })
    }

    /// Weight for offset `m` in `-2..=2`.
    #[inline]
    pub fn weight(&self, m: isize) -> f64 {
        self.taps[(m + 2) as usize]
    }

    pub fn taps(&self) -> [f64; 5] {
        self.taps
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Self::new(0.4).expect("default kernel")
    }
}

#[inline]
pub fn half_size(d: usize) -> usize {
    d.div_ceil(2)
}

/// Blur with the generating kernel and keep every second sample.
pub fn reduce(level: &Grid, kernel: &Kernel) -> Result<Grid> {
    let (w, h) = level.dims();
    if w < 2 || h < 2 {
        return Err(Error::Shape(format!("reduce needs at least 2x2, got {w}x{h}")));
    }
    let (ow, oh) = (half_size(w), half_size(h));

    // Horizontal pass: h rows of ow samples.
    let mut horiz = vec![0.0; ow * h];
    fill_rows(&mut horiz, ow, |y, out| {
        let row = level.row(y);
        for (i, o) in out.iter_mut().enumerate() {
            let c = 2 * i as isize;
            *o = (-2..=2).map(|m| kernel.weight(m) * row[mirror(c + m, w)]).sum();
        }
    });

    let mut data = vec![0.0; ow * oh];
    fill_rows(&mut data, ow, |j, out| {
        let c = 2 * j as isize;
        for m in -2..=2isize {
            let src = &horiz[mirror(c + m, h) * ow..][..ow];
            let k = kernel.weight(m);
            for (o, s) in out.iter_mut().zip(src) {
                *o += k * s;
            }
        }
    });
    Grid::new(ow, oh, data)
}

fn check_expand_target(from: usize, to: usize) -> Result<()> {
    if to == 2 * from || (to + 1 == 2 * from && to > 0) {
        Ok(())
    } else {
        Err(Error::Shape(format!("cannot expand size {from} to {to} (expected {} or {})", 2 * from - 1, 2 * from)))
    }
}

/// Zero-interleave upsampling to `target_w x target_h` followed by the
/// generating kernel scaled by 4 (2 per axis). Constants are preserved.
pub fn expand(level: &Grid, target_w: usize, target_h: usize, kernel: &Kernel) -> Result<Grid> {
    let (w, h) = level.dims();
    check_expand_target(w, target_w)?;
    check_expand_target(h, target_h)?;

    // Horizontal pass on the h coarse rows. Only even upsampled positions
    // carry samples; mirroring keeps parity so odd positions stay zero.
    let mut horiz = vec![0.0; target_w * h];
    fill_rows(&mut horiz, target_w, |y, out| {
        let row = level.row(y);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for m in -2..=2isize {
                let k = mirror(i as isize - m, target_w);
                if k.is_multiple_of(2) {
                    acc += kernel.weight(m) * row[k / 2];
                }
            }
            *o = 2.0 * acc;
        }
    });

    let mut data = vec![0.0; target_w * target_h];
    fill_rows(&mut data, target_w, |j, out| {
        for m in -2..=2isize {
            let k = mirror(j as isize - m, target_h);
            if !k.is_multiple_of(2) {
                continue;
            }
            let src = &horiz[(k / 2) * target_w..][..target_w];
            let wgt = 2.0 * kernel.weight(m);
            for (o, s) in out.iter_mut().zip(src) {
                *o += wgt * s;
            }
        }
    });
    Grid::new(target_w, target_h, data)
}

/// Ordered list of grids, index 0 finest; each level is the ceil-half of the
/// previous one.
#[derive(Clone, Debug, PartialEq)]
pub struct Pyramid {
    levels: Vec<Grid>,
}

impl Pyramid {
    pub fn new(levels: Vec<Grid>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Shape("pyramid needs at least one level".into()));
        }
        for (n, pair) in levels.windows(2).enumerate() {
            let (w, h) = pair[0].dims();
            if pair[1].dims() != (half_size(w), half_size(h)) {
                return Err(Error::Shape(format!(
                    "level {} is {:?}, expected half of level {n} ({w}x{h})",
                    n + 1,
                    pair[1].dims()
                )));
            }
        }
        Ok(Self { levels })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, n: usize) -> &Grid {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Grid] {
        &self.levels
    }

    pub fn into_levels(self) -> Vec<Grid> {
        self.levels
    }

    pub fn all_finite(&self) -> bool {
        self.levels.iter().all(Grid::all_finite)
    }
}

/// Deepest `N` for which a `w x h` image still has a level `N + 1` of at
/// least 2x2, or `None` if the image itself is smaller than that.
pub fn max_depth(w: usize, h: usize) -> Option<usize> {
    let (mut w, mut h) = (w, h);
    if w < 2 || h < 2 {
        return None;
    }
    let mut seed_level = 0usize;
    while half_size(w) >= 2 && half_size(h) >= 2 && (w > 2 || h > 2) {
        w = half_size(w);
        h = half_size(h);
        seed_level += 1;
    }
    seed_level.checked_sub(1)
}

/// Levels `0..=N+1`: the input followed by N + 1 successive reductions.
pub fn build_gaussian_pyramid(input: &Grid, depth: usize, kernel: &Kernel) -> Result<Pyramid> {
    let (w, h) = input.dims();
    match max_depth(w, h) {
        Some(max) if depth <= max => {}
        _ => {
            return Err(Error::Param(format!("pyramid depth {depth} too deep for a {w}x{h} image")));
        }
    }
    let mut levels = Vec::with_capacity(depth + 2);
    levels.push(input.clone());
    for n in 0..=depth {
        let next = reduce(&levels[n], kernel)?;
        levels.push(next);
    }
    Pyramid::new(levels)
}

/// Expand `coarse` to the size of `fine`.
pub fn expand_to(coarse: &Grid, fine: &Grid, kernel: &Kernel) -> Result<Grid> {
    expand(coarse, fine.width(), fine.height(), kernel)
}

/// `C_n = B_n / max(expand(B_{n+1}), epsilon)` for `n` in `0..=N`.
pub fn build_contrast_pyramid(gauss: &Pyramid, kernel: &Kernel, epsilon: f64) -> Result<Pyramid> {
    if gauss.len() < 2 {
        return Err(Error::Shape("contrast pyramid needs at least two Gaussian levels".into()));
    }
    let levels = gauss
        .levels()
        .windows(2)
        .map(|pair| {
            let e = expand_to(&pair[1], &pair[0], kernel)?;
            Ok(pair[0].zip_map(&e, |b, e| b / e.max(epsilon)))
        })
        .collect::<Result<Vec<_>>>()?;
    Pyramid::new(levels)
}

/// Rebuild the finest level from modulated contrasts, seeded with the
/// coarsest Gaussian level: `B̂_n = Ĉ_n * expand(B̂_{n+1})`.
pub fn collapse(contrasts: &Pyramid, gauss: &Pyramid, kernel: &Kernel) -> Result<Grid> {
    if contrasts.len() + 1 != gauss.len() {
        return Err(Error::Shape(format!(
            "collapse needs {} contrast levels for a {}-level Gaussian pyramid, got {}",
            gauss.len() - 1,
            gauss.len(),
            contrasts.len()
        )));
    }
    let mut current = gauss.level(gauss.len() - 1).clone();
    for c in contrasts.levels().iter().rev() {
        let e = expand_to(&current, c, kernel)?;
        current = c.zip_map(&e, |c, e| c * e);
    }
    Ok(current)
}
