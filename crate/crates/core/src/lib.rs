//! Multi-scale contrast-adaptive companding of high-dynamic-range CT slices.
//!
//! A slice in Hounsfield units is clipped, normalized to `[epsilon, 1]`,
//! optionally soft-tissue enhanced, and decomposed into a Gaussian pyramid
//! and a ratio (contrast) pyramid. A texture-contrast pyramid drives a
//! per-pixel exponent that steepens a Naka-Rushton response on each contrast
//! level, with the strength split softly between a bone and a soft-tissue
//! channel. Collapsing the modulated pyramid gives a single display image.
//!
//! ```
//! use ct_compand::{compand, phantom, BitDepth, CompandParams};
//!
//! let slice = phantom::mandible_phantom(&phantom::PhantomSpec::default());
//! let image = compand(&slice, &CompandParams::default(), BitDepth::Eight).unwrap();
//! assert_eq!(image.width(), 256);
//! ```

pub mod enhance;
pub mod error;
pub mod grid;
pub mod ingest;
pub mod modulate;
pub mod params;
pub mod phantom;
pub mod pyramid;
pub mod render;
pub mod slice;
pub mod texture;

pub use error::{Error, Result};
pub use grid::Grid;
pub use params::{CompandParams, Mode, ParamError, TeethLevel};
pub use pyramid::{Kernel, Pyramid};
pub use render::{compand, compand_stages, quantize_output, window_render, CompandStages};
pub use slice::{normalize_to_unit, BitDepth, HuSlice, LdrImage, Normalization, WindowSpec};
