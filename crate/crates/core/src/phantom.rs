//! Synthetic axial mandible phantom in HU.
//!
//! Layout (256 x 256 at 0.5 mm): a soft-tissue head outline in air, an
//! airway, a fat pad, a thick U-shaped mandible, seven teeth with pulp
//! embedded in the bone, one metal filling, and a low-contrast lesion in
//! the soft tissue inside the arch. Gaussian noise uses a fixed seed, so the
//! phantom is reproducible bit-for-bit on a given platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::grid::Grid;
use crate::render::Roi;
use crate::slice::HuSlice;

pub const AIR_HU: f64 = -1000.0;
pub const FAT_HU: f64 = -100.0;
pub const SOFT_HU: f64 = 60.0;
pub const LESION_HU: f64 = 30.0;
pub const BONE_HU: f64 = 1000.0;
pub const TOOTH_HU: f64 = 2200.0;
pub const PULP_HU: f64 = 300.0;
pub const METAL_HU: f64 = 8000.0;

#[derive(Clone, Debug, PartialEq)]
pub struct PhantomSpec {
    pub size: usize,
    pub pixel_spacing_mm: f64,
    pub noise_hu: f64,
    pub seed: u64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self { size: 256, pixel_spacing_mm: 0.5, noise_hu: 10.0, seed: 0x5EED_CAFE }
    }
}

#[derive(Clone, Copy, Debug)]
struct Ellipse {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
}

impl Ellipse {
    fn contains(&self, x: f64, y: f64) -> bool {
        let dx = (x - self.cx) / self.rx;
        let dy = (y - self.cy) / self.ry;
        dx * dx + dy * dy <= 1.0
    }
}

fn disc(cx: f64, cy: f64, r: f64) -> Ellipse {
    Ellipse { cx, cy, rx: r, ry: r }
}

/// Geometry scaled from the 256-pixel reference layout.
struct Layout {
    head: Ellipse,
    airway: Ellipse,
    fat: Ellipse,
    jaw_outer: Ellipse,
    jaw_inner: Ellipse,
    jaw_top: f64,
    teeth: Vec<(Ellipse, Ellipse)>,
    metal: Ellipse,
    lesion: Ellipse,
    scale: f64,
}

impl Layout {
    fn new(size: usize) -> Self {
        let s = size as f64 / 256.0;
        let (cx, jaw_cy) = (128.0 * s, 150.0 * s);
        // Teeth sit on the midline of the bone band.
        let (mid_rx, mid_ry) = (82.0 * s, 72.0 * s);
        let teeth = (0..7)
            .map(|i| {
                let theta = (30.0 + 20.0 * i as f64).to_radians();
                let (tx, ty) = (cx + mid_rx * theta.cos(), jaw_cy + mid_ry * theta.sin());
                (disc(tx, ty, 8.0 * s), disc(tx, ty, 2.5 * s))
            })
            .collect::<Vec<_>>();
        let metal_at = teeth[1].0;
        Self {
            head: Ellipse { cx, cy: 128.0 * s, rx: 118.0 * s, ry: 104.0 * s },
            airway: disc(cx, 62.0 * s, 11.0 * s),
            fat: Ellipse { cx: 60.0 * s, cy: 70.0 * s, rx: 16.0 * s, ry: 10.0 * s },
            jaw_outer: Ellipse { cx, cy: jaw_cy, rx: 94.0 * s, ry: 84.0 * s },
            jaw_inner: Ellipse { cx, cy: jaw_cy, rx: 70.0 * s, ry: 60.0 * s },
            jaw_top: 140.0 * s,
            teeth,
            metal: disc(metal_at.cx + 3.0 * s, metal_at.cy - 3.0 * s, 2.0 * s),
            lesion: disc(cx, jaw_cy, 14.0 * s),
            scale: s,
        }
    }

    fn hu(&self, x: f64, y: f64) -> f64 {
        if !self.head.contains(x, y) {
            return AIR_HU;
        }
        if self.metal.contains(x, y) {
            return METAL_HU;
        }
        for (tooth, pulp) in &self.teeth {
            if pulp.contains(x, y) {
                return PULP_HU;
            }
            if tooth.contains(x, y) {
                return TOOTH_HU;
            }
        }
        if y >= self.jaw_top && self.jaw_outer.contains(x, y) && !self.jaw_inner.contains(x, y) {
            return BONE_HU;
        }
        if self.airway.contains(x, y) {
            return AIR_HU;
        }
        if self.fat.contains(x, y) {
            return FAT_HU;
        }
        if self.lesion.contains(x, y) {
            return LESION_HU;
        }
        SOFT_HU
    }
}

/// Noise-free phantom.
pub fn mandible_phantom_clean(spec: &PhantomSpec) -> Grid {
    let layout = Layout::new(spec.size);
    Grid::from_fn(spec.size, spec.size, |x, y| layout.hu(x as f64 + 0.5, y as f64 + 0.5))
}

pub fn mandible_phantom(spec: &PhantomSpec) -> HuSlice {
    let mut grid = mandible_phantom_clean(spec);
    if spec.noise_hu > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let normal = Normal::new(0.0, spec.noise_hu).expect("positive sigma");
        for v in grid.as_mut_slice() {
            *v += normal.sample(&mut rng);
        }
    }
    HuSlice::new(grid, (spec.pixel_spacing_mm, spec.pixel_spacing_mm), "mandible_phantom")
        .expect("phantom size is at least 16")
}

/// Named regions of interest on the phantom.
pub fn phantom_rois(spec: &PhantomSpec) -> Vec<Roi> {
    let layout = Layout::new(spec.size);
    let square = |name: &str, e: &Ellipse, half: f64| {
        let half = (half * layout.scale).round() as usize;
        let (cx, cy) = (e.cx.round() as usize, e.cy.round() as usize);
        Roi::new(name, cx - half, cy - half, 2 * half, 2 * half)
    };
    vec![
        // Lesion plus a ring of surrounding soft tissue, clear of bone.
        square("soft_lesion", &layout.lesion, 24.0),
        // Central tooth and the bone band around it; no soft tissue.
        square("teeth_disc", &layout.teeth[3].0, 10.0),
        square("soft_tissue", &disc(200.0 * layout.scale, 90.0 * layout.scale, 1.0), 10.0),
    ]
}
