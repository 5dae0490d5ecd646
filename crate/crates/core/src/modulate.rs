//! Adaptation exponent and Naka-Rushton modulation of the contrast pyramid.
//!
//! Per level `n` and pixel:
//!
//! ```text
//! ST      = exp(-B_m / max(B_m))            soft threshold at the teeth level m
//! delta_n = A (1 - ST) lambda_bone[n] + B ST lambda_soft[n]
//! gamma_n = delta_n (max(S_n) - S_n)
//! Ĉ_n     = R_max / (alpha + (beta / C_n)^gamma_n) + b
//! ```
//!
//! Low-texture regions get a large exponent (steep response, contrast gain),
//! the most textured pixel of each level gets `gamma = 0` and maps to 1.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::{CompandParams, Mode};
use crate::pyramid::{expand_to, reduce, Kernel, Pyramid};

/// Naka-Rushton response constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NakaRushton {
    pub alpha: f64,
    pub beta: f64,
    pub offset: f64,
    pub r_max: f64,
}

impl NakaRushton {
    pub fn from_params(p: &CompandParams) -> Self {
        Self { alpha: p.alpha, beta: p.beta, offset: p.offset, r_max: p.r_max }
    }

    #[inline]
    pub fn response(&self, contrast: f64, gamma: f64) -> f64 {
        self.r_max / (self.alpha + (self.beta / contrast).powf(gamma)) + self.offset
    }
}

impl Default for NakaRushton {
    fn default() -> Self {
        Self::from_params(&CompandParams::default())
    }
}

/// `exp(-B_m / max(B_m))`.
pub fn soft_threshold_level(b_m: &Grid) -> Result<Grid> {
    let max = b_m.max();
    if !(max > 0.0) {
        return Err(Error::Degenerate(format!("soft threshold needs max(B_m) > 0, got {max}")));
    }
    Ok(b_m.map(|b| (-b / max).exp()))
}

/// Soft threshold evaluated at level `m` and resampled onto every contrast
/// level `0..=N`: expanded towards finer levels, reduced towards coarser ones.
pub fn soft_threshold_field(gauss: &Pyramid, m: usize, kernel: &Kernel) -> Result<Vec<Grid>> {
    if gauss.len() < 2 {
        return Err(Error::Shape("soft threshold needs at least two Gaussian levels".into()));
    }
    let depth = gauss.len() - 2;
    if m > depth {
        return Err(Error::Param(format!("teeth level exceeds pyramid depth ({m} > {depth})")));
    }
    let at_m = soft_threshold_level(gauss.level(m))?;

    let mut fields: Vec<Option<Grid>> = vec![None; depth + 1];
    let mut cur = at_m.clone();
    for n in (0..m).rev() {
        cur = expand_to(&cur, gauss.level(n), kernel)?;
        fields[n] = Some(cur.clone());
    }
    let mut cur = at_m.clone();
    for field in fields.iter_mut().skip(m + 1) {
        cur = reduce(&cur, kernel)?;
        *field = Some(cur.clone());
    }
    fields[m] = Some(at_m);
    Ok(fields.into_iter().map(|f| f.expect("every level filled")).collect())
}

/// The two channel weights `(A (1 - ST) lambda_bone, B ST lambda_soft)`.
#[inline]
pub fn channel_weights(st: f64, amp_bone: f64, amp_soft: f64, lambda_bone: f64, lambda_soft: f64) -> (f64, f64) {
    (amp_bone * (1.0 - st) * lambda_bone, amp_soft * st * lambda_soft)
}

/// Enhancement strength for level `n` from its soft-threshold field.
pub fn delta_field(st: &Grid, n: usize, p: &CompandParams) -> Grid {
    let (lb, ls) = (p.lambda_bone[n], p.lambda_soft[n]);
    st.map(|s| {
        let (bone, soft) = channel_weights(s, p.amp_bone, p.amp_soft, lb, ls);
        bone + soft
    })
}

/// `gamma = delta * (max(S) - S)`.
pub fn gamma_field(texture: &Grid, delta: &Grid) -> Grid {
    let max = texture.max();
    texture.zip_map(delta, |s, d| d * (max - s))
}

pub fn naka_rushton(contrast: &Grid, gamma: &Grid, nr: &NakaRushton) -> Grid {
    contrast.zip_map(gamma, |c, g| nr.response(c, g))
}

/// Modulate every contrast level. In CT mode the enhancement strength comes
/// from the soft-threshold channel split at `teeth_level`; in natural mode it
/// is the single constant `A * lambda_bone[n]` per level.
pub fn modulate_contrast_pyramid(
    contrasts: &Pyramid,
    texture: &Pyramid,
    gauss: &Pyramid,
    p: &CompandParams,
    teeth_level: usize,
) -> Result<Pyramid> {
    Ok(modulation_stages(contrasts, texture, gauss, p, teeth_level)?.modulated)
}

/// Intermediate fields of the modulation stage, kept for inspection.
#[derive(Clone, Debug)]
pub struct ModulationStages {
    /// Soft threshold per level; empty in natural mode.
    pub soft_threshold: Vec<Grid>,
    pub gamma: Vec<Grid>,
    pub modulated: Pyramid,
}

pub fn modulation_stages(
    contrasts: &Pyramid,
    texture: &Pyramid,
    gauss: &Pyramid,
    p: &CompandParams,
    teeth_level: usize,
) -> Result<ModulationStages> {
    let levels = contrasts.len();
    if texture.len() != levels || gauss.len() != levels + 1 {
        return Err(Error::Shape(format!(
            "modulation needs matching depths: {} contrast, {} texture, {} Gaussian levels",
            levels,
            texture.len(),
            gauss.len()
        )));
    }
    if p.lambda_bone.len() < levels || p.lambda_soft.len() < levels {
        return Err(Error::Param(format!("channel gains need {levels} entries")));
    }
    let kernel = Kernel::new(p.kernel_a)?;
    let nr = NakaRushton::from_params(p);

    let soft_threshold = match p.mode {
        Mode::Ct => soft_threshold_field(gauss, teeth_level, &kernel)?,
        Mode::Natural => Vec::new(),
    };

    let mut gamma = Vec::with_capacity(levels);
    let mut modulated = Vec::with_capacity(levels);
    for n in 0..levels {
        let c = contrasts.level(n);
        let delta = match p.mode {
            Mode::Ct => delta_field(&soft_threshold[n], n, p),
            Mode::Natural => Grid::filled(c.width(), c.height(), p.amp_bone * p.lambda_bone[n]),
        };
        let g = gamma_field(texture.level(n), &delta);
        modulated.push(naka_rushton(c, &g, &nr));
        gamma.push(g);
    }
    Ok(ModulationStages { soft_threshold, gamma, modulated: Pyramid::new(modulated)? })
}
