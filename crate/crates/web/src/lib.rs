//! Browser bindings for the companding demo.
//!
//! The page gets three operations: a family of response curves, a MACC
//! render of the synthetic phantom under slider-controlled parameters, and a
//! plain window/level render of the same slice for comparison. Images come
//! back as RGBA bytes ready for `ImageData`.

use ct_compand::modulate::NakaRushton;
use ct_compand::phantom::{mandible_phantom, phantom_rois, PhantomSpec};
use ct_compand::render::{contrast_metrics, Roi};
use ct_compand::{compand, window_render, BitDepth, CompandParams, HuSlice, LdrImage, WindowSpec};
use wasm_bindgen::prelude::*;

/// Response curves for each gamma, sampled at `samples` contrasts evenly
/// spaced over `(0, c_max]`, flattened curve by curve.
#[wasm_bindgen]
pub fn response_curves(gammas: &[f64], samples: usize, c_max: f64) -> Vec<f64> {
    let nr = NakaRushton::default();
    let mut out = Vec::with_capacity(gammas.len() * samples);
    for &g in gammas {
        out.extend((1..=samples).map(|i| nr.response(c_max * i as f64 / samples as f64, g)));
    }
    out
}

/// Gray values expanded to opaque RGBA.
pub fn to_rgba(img: &LdrImage) -> Vec<u8> {
    let shift = img.bit_depth().bits() - 8;
    img.values()
        .iter()
        .flat_map(|&v| {
            let g = (v >> shift) as u8;
            [g, g, g, 255]
        })
        .collect()
}

/// The phantom slice plus the regions the page reports metrics for.
#[wasm_bindgen]
pub struct Phantom {
    slice: HuSlice,
    lesion: Roi,
    last_rms: f64,
}

#[wasm_bindgen]
impl Phantom {
    #[wasm_bindgen(constructor)]
    pub fn new(size: usize, seed: u64) -> Result<Phantom, JsError> {
        Self::build(size, seed).map_err(|e| JsError::new(&e))
    }

    pub fn width(&self) -> usize {
        self.slice.width()
    }

    pub fn height(&self) -> usize {
        self.slice.height()
    }

    /// MACC render with the bone/soft amplitudes, texture exponent and
    /// pre-enhancement gains taken from the sliders.
    pub fn compand(&mut self, amp_bone: f64, amp_soft: f64, mu: f64, c1: f64, c2: f64) -> Result<Vec<u8>, JsError> {
        self.compand_rgba(amp_bone, amp_soft, mu, c1, c2).map_err(|e| JsError::new(&e))
    }

    pub fn window(&mut self, level: f64, width: f64) -> Result<Vec<u8>, JsError> {
        self.window_rgba(level, width).map_err(|e| JsError::new(&e))
    }

    /// RMS contrast of the soft-lesion region in the most recent render.
    pub fn lesion_rms(&self) -> f64 {
        self.last_rms
    }
}

impl Phantom {
    pub fn build(size: usize, seed: u64) -> Result<Phantom, String> {
        if size < 64 {
            return Err(format!("phantom size must be at least 64, got {size}"));
        }
        let spec = PhantomSpec { size, seed, ..Default::default() };
        let lesion = phantom_rois(&spec).swap_remove(0);
        Ok(Phantom { slice: mandible_phantom(&spec), lesion, last_rms: 0.0 })
    }

    pub fn compand_rgba(&mut self, amp_bone: f64, amp_soft: f64, mu: f64, c1: f64, c2: f64) -> Result<Vec<u8>, String> {
        let p = CompandParams { amp_bone, amp_soft, mu, c1, c2, ..Default::default() };
        let img = compand(&self.slice, &p, BitDepth::Eight).map_err(|e| e.to_string())?;
        self.finish(&img)
    }

    pub fn window_rgba(&mut self, level: f64, width: f64) -> Result<Vec<u8>, String> {
        let w = WindowSpec::new(level, width, "custom").map_err(|e| e.to_string())?;
        let img = window_render(&self.slice, &w, BitDepth::Eight);
        self.finish(&img)
    }

    fn finish(&mut self, img: &LdrImage) -> Result<Vec<u8>, String> {
        self.last_rms = contrast_metrics(img, &self.lesion).map_err(|e| e.to_string())?.rms_contrast;
        Ok(to_rgba(img))
    }
}
