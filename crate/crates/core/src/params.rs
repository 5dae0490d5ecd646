//! The full set of pipeline constants, their validation, and the flat
//! `key = value` parameter file format.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Processing mode. `Natural` skips metal clipping, soft-tissue enhancement
/// and the bone/soft channel split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Ct,
    Natural,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ct => "ct",
            Mode::Natural => "natural",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ct" => Ok(Mode::Ct),
            "natural" => Ok(Mode::Natural),
            other => Err(format!("unknown mode `{other}` (expected ct or natural)")),
        }
    }
}

/// Pyramid level used to evaluate the bone/soft soft threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TeethLevel {
    /// Pick the level whose sampling is closest to a 10 mm structure.
    #[default]
    Auto,
    Fixed(usize),
}

impl fmt::Display for TeethLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TeethLevel::Auto => f.write_str("auto"),
            TeethLevel::Fixed(m) => write!(f, "{m}"),
        }
    }
}

/// Physical size the automatic teeth level is matched to.
pub const TEETH_SCALE_MM: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct CompandParams {
    /// HU clip bounds applied on ingestion (metal reduction).
    pub hu_min_clip: f64,
    pub hu_max_clip: f64,
    /// HU bounds of the soft-tissue band.
    pub soft_lo: f64,
    pub soft_hi: f64,

    /// Enhancement turnover intensity, normalized units.
    pub v: f64,
    pub c1: f64,
    pub c2: f64,
    /// Radius in pixels of the surround neighborhood.
    pub srnd_radius: usize,

    /// Coarsest contrast level index N. The Gaussian pyramid has N + 2 levels.
    pub levels: usize,
    /// Center weight of the 5-tap generating kernel.
    pub kernel_a: f64,

    /// Texture-contrast power-law exponent.
    pub mu: f64,
    /// Per-level blend weights for levels 0..N-1 (level N has no coarser
    /// texture context).
    pub w_n: Vec<f64>,

    pub teeth_level: TeethLevel,
    /// Bone channel amplitude (A).
    pub amp_bone: f64,
    /// Soft-tissue channel amplitude (B).
    pub amp_soft: f64,
    pub lambda_bone: Vec<f64>,
    pub lambda_soft: Vec<f64>,

    // Naka-Rushton response constants.
    pub alpha: f64,
    pub beta: f64,
    pub offset: f64,
    pub r_max: f64,

    /// Positivity floor for normalized intensities and contrast division.
    pub epsilon: f64,

    /// Percentile window of the output stretch.
    pub lo_pct: f64,
    pub hi_pct: f64,

    pub mode: Mode,
}

impl Default for CompandParams {
    fn default() -> Self {
        let hu_min_clip = -1024.0;
        let hu_max_clip = 3071.0;
        let soft_hi = 300.0;
        let alpha = 1.0;
        let offset = 0.0;
        Self {
            hu_min_clip,
            hu_max_clip,
            soft_lo: -200.0,
            soft_hi,
            v: (soft_hi - hu_min_clip) / (hu_max_clip - hu_min_clip),
            c1: 0.1,
            c2: 0.05,
            srnd_radius: 8,
            levels: 5,
            kernel_a: 0.4,
            mu: 0.7,
            w_n: vec![0.5; 5],
            teeth_level: TeethLevel::Auto,
            // Texture differences on the unit intensity scale are of order
            // 1e-2, so unit amplitudes keep every exponent below 1 and the
            // curves only compress. These values were tuned on the phantom.
            amp_bone: 30.0,
            amp_soft: 60.0,
            lambda_bone: vec![1.2, 1.2, 1.0, 0.8, 0.6, 0.5],
            lambda_soft: vec![0.6, 0.7, 0.8, 0.8, 0.7, 0.6],
            alpha,
            beta: 1.0,
            offset,
            r_max: (alpha + 1.0) * (1.0 - offset),
            epsilon: 1e-3,
            lo_pct: 0.5,
            hi_pct: 99.5,
            mode: Mode::Ct,
        }
    }
}

/// One violated parameter invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamError {
    pub key: &'static str,
    pub message: String,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ParamError {}

impl CompandParams {
    /// Every violated invariant; empty when the parameter set is usable.
    pub fn violations(&self) -> Vec<ParamError> {
        let mut errs = Vec::new();
        let mut fail = |key: &'static str, message: String| errs.push(ParamError { key, message });

        let scalars: [(&'static str, f64); 17] = [
            ("hu_min_clip", self.hu_min_clip),
            ("hu_max_clip", self.hu_max_clip),
            ("soft_lo", self.soft_lo),
            ("soft_hi", self.soft_hi),
            ("v", self.v),
            ("c1", self.c1),
            ("c2", self.c2),
            ("kernel_a", self.kernel_a),
            ("mu", self.mu),
            ("amp_bone", self.amp_bone),
            ("amp_soft", self.amp_soft),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("offset", self.offset),
            ("r_max", self.r_max),
            ("epsilon", self.epsilon),
            ("lo_pct", self.lo_pct),
        ];
        let mut all_finite = self.hi_pct.is_finite();
        for (key, value) in scalars {
            if !value.is_finite() {
                fail(key, format!("{key} must be finite"));
                all_finite = false;
            }
        }
        if !all_finite {
            return errs;
        }

        if self.hu_max_clip <= self.hu_min_clip {
            fail("hu_max_clip", "hu_max_clip must exceed hu_min_clip".into());
        }
        if self.soft_hi <= self.soft_lo {
            fail("soft_hi", "soft_hi must exceed soft_lo".into());
        }
        if !(self.v > 0.0 && self.v < 1.0) {
            fail("v", format!("v must lie in (0, 1), got {}", self.v));
        }
        if self.c1 < 0.0 || self.c2 < 0.0 {
            fail("c1", "c1 and c2 must be nonnegative".into());
        }
        if self.srnd_radius == 0 {
            fail("srnd_radius", "srnd_radius must be at least 1".into());
        }
        if !(self.kernel_a > 0.0 && self.kernel_a < 1.0) {
            fail("kernel_a", format!("kernel_a must lie in (0, 1), got {}", self.kernel_a));
        }
        if self.mu <= 0.0 {
            fail("mu", format!("mu must be positive, got {}", self.mu));
        }
        if self.w_n.len() != self.levels {
            fail("w_n", format!("w_n needs {} entries (one per level 0..N-1), got {}", self.levels, self.w_n.len()));
        }
        if self.w_n.iter().any(|w| !(0.0..=1.0).contains(w)) {
            fail("w_n", "every w_n entry must lie in [0, 1]".into());
        }
        if let TeethLevel::Fixed(m) = self.teeth_level {
            if m > self.levels {
                fail("teeth_level", format!("teeth level exceeds pyramid depth ({m} > {})", self.levels));
            }
        }
        if self.amp_bone < 0.0 || self.amp_soft < 0.0 {
            fail("amp_bone", "channel amplitudes must be nonnegative".into());
        }
        for (key, lambda) in [("lambda_bone", &self.lambda_bone), ("lambda_soft", &self.lambda_soft)] {
            if lambda.len() != self.levels + 1 {
                fail(
                    key,
                    format!("{key} needs {} entries (one per level 0..N), got {}", self.levels + 1, lambda.len()),
                );
            }
            if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
                fail(key, format!("every {key} entry must be finite and nonnegative"));
            }
        }
        if self.alpha < 0.0 {
            fail("alpha", "alpha must be nonnegative".into());
        }
        if self.beta != 1.0 {
            fail("beta", format!("beta must be 1, got {}", self.beta));
        }
        if self.offset >= 1.0 {
            fail("offset", "offset b must be below 1".into());
        }
        let want = (self.alpha + 1.0) * (1.0 - self.offset);
        if (self.r_max - want).abs() > 1e-12 * want.abs().max(1.0) {
            fail("r_max", format!("r_max must equal (alpha + 1)(1 - b) = {want}, got {}", self.r_max));
        }
        if self.epsilon <= 0.0 || self.epsilon >= 1.0 {
            fail("epsilon", "epsilon must lie in (0, 1)".into());
        }
        if !(0.0 <= self.lo_pct && self.lo_pct < self.hi_pct && self.hi_pct <= 100.0) {
            fail("lo_pct", "percentiles must satisfy 0 <= lo_pct < hi_pct <= 100".into());
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Params(errs))
        }
    }

    /// Teeth level for a slice with the given pixel spacing (mm).
    pub fn resolve_teeth_level(&self, pixel_spacing_mm: (f64, f64)) -> usize {
        match self.teeth_level {
            TeethLevel::Fixed(m) => m.min(self.levels),
            TeethLevel::Auto => auto_teeth_level(pixel_spacing_mm, self.levels),
        }
    }

    /// Set `levels` and resize every per-level vector, repeating the last
    /// entry when growing.
    pub fn with_levels(mut self, levels: usize) -> Self {
        fn resize(v: &mut Vec<f64>, len: usize, fallback: f64) {
            let fill = v.last().copied().unwrap_or(fallback);
            v.resize(len, fill);
        }
        self.levels = levels;
        resize(&mut self.w_n, levels, 0.5);
        resize(&mut self.lambda_bone, levels + 1, 1.0);
        resize(&mut self.lambda_soft, levels + 1, 1.0);
        if let TeethLevel::Fixed(m) = self.teeth_level {
            self.teeth_level = TeethLevel::Fixed(m.min(levels));
        }
        self
    }

    /// Convert a HU value to normalized units using the clip bounds.
    pub fn hu_to_unit(&self, hu: f64) -> f64 {
        (hu - self.hu_min_clip) / (self.hu_max_clip - self.hu_min_clip)
    }
}

/// `round(log2(10 mm / spacing))` clamped to `0..=levels`.
pub fn auto_teeth_level(pixel_spacing_mm: (f64, f64), levels: usize) -> usize {
    let spacing = 0.5 * (pixel_spacing_mm.0 + pixel_spacing_mm.1);
    if !(spacing.is_finite() && spacing > 0.0) {
        return levels.min(3);
    }
    let m = (TEETH_SCALE_MM / spacing).log2().round();
    m.clamp(0.0, levels as f64) as usize
}

// Parameter file

struct KeyDoc {
    key: &'static str,
    doc: &'static str,
}

const KEYS: &[KeyDoc] = &[
    KeyDoc { key: "mode", doc: "ct | natural; natural skips metal clipping, enhancement and the channel split" },
    KeyDoc { key: "hu_min_clip", doc: "lower HU clip bound; also the zero of the normalized scale" },
    KeyDoc { key: "hu_max_clip", doc: "upper HU clip bound (metal reduction); maps to 1.0" },
    KeyDoc { key: "soft_lo", doc: "lower HU bound of the soft-tissue band" },
    KeyDoc { key: "soft_hi", doc: "upper HU bound of the soft-tissue band" },
    KeyDoc { key: "v", doc: "enhancement turnover intensity V, normalized units (default = soft_hi)" },
    KeyDoc { key: "c1", doc: "enhancement amplitude above V (weight parabola apex)" },
    KeyDoc { key: "c2", doc: "enhancement amplitude below V" },
    KeyDoc { key: "srnd_radius", doc: "surround neighborhood radius in pixels (Gaussian sigma = radius / 2)" },
    KeyDoc { key: "levels", doc: "coarsest contrast level N; the Gaussian pyramid holds N + 2 levels" },
    KeyDoc { key: "kernel_a", doc: "generating kernel center weight a: [1/4 - a/2, 1/4, a, 1/4, 1/4 - a/2]" },
    KeyDoc { key: "mu", doc: "texture-contrast power-law exponent" },
    KeyDoc { key: "w_n", doc: "texture blend weight per level 0..N-1, each in [0, 1]" },
    KeyDoc { key: "teeth_level", doc: "soft-threshold level m, or auto (nearest to 10 mm sampling)" },
    KeyDoc { key: "amp_bone", doc: "bone channel amplitude A" },
    KeyDoc { key: "amp_soft", doc: "soft-tissue channel amplitude B" },
    KeyDoc { key: "lambda_bone", doc: "bone channel gain per level 0..N" },
    KeyDoc { key: "lambda_soft", doc: "soft-tissue channel gain per level 0..N" },
    KeyDoc { key: "alpha", doc: "Naka-Rushton alpha" },
    KeyDoc { key: "beta", doc: "Naka-Rushton beta; must be 1 so every response curve passes through (1, 1)" },
    KeyDoc { key: "offset", doc: "Naka-Rushton offset b" },
    KeyDoc { key: "r_max", doc: "Naka-Rushton R_max; must equal (alpha + 1)(1 - b)" },
    KeyDoc { key: "epsilon", doc: "positivity floor for normalized intensities and contrast division" },
    KeyDoc { key: "lo_pct", doc: "lower percentile of the output stretch" },
    KeyDoc { key: "hi_pct", doc: "upper percentile of the output stretch" },
];

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl CompandParams {
    fn value_text(&self, key: &str) -> String {
        match key {
            "mode" => self.mode.to_string(),
            "hu_min_clip" => self.hu_min_clip.to_string(),
            "hu_max_clip" => self.hu_max_clip.to_string(),
            "soft_lo" => self.soft_lo.to_string(),
            "soft_hi" => self.soft_hi.to_string(),
            "v" => self.v.to_string(),
            "c1" => self.c1.to_string(),
            "c2" => self.c2.to_string(),
            "srnd_radius" => self.srnd_radius.to_string(),
            "levels" => self.levels.to_string(),
            "kernel_a" => self.kernel_a.to_string(),
            "mu" => self.mu.to_string(),
            "w_n" => fmt_list(&self.w_n),
            "teeth_level" => self.teeth_level.to_string(),
            "amp_bone" => self.amp_bone.to_string(),
            "amp_soft" => self.amp_soft.to_string(),
            "lambda_bone" => fmt_list(&self.lambda_bone),
            "lambda_soft" => fmt_list(&self.lambda_soft),
            "alpha" => self.alpha.to_string(),
            "beta" => self.beta.to_string(),
            "offset" => self.offset.to_string(),
            "r_max" => self.r_max.to_string(),
            "epsilon" => self.epsilon.to_string(),
            "lo_pct" => self.lo_pct.to_string(),
            "hi_pct" => self.hi_pct.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// Parameter file text with a comment above every key.
    pub fn to_file_string(&self) -> String {
        let mut out = String::from("# ct-compand parameter file: key = value, lists comma-separated\n");
        for k in KEYS {
            out.push_str(&format!("\n# {}\n{} = {}\n", k.doc, k.key, self.value_text(k.key)));
        }
        out
    }

    /// Comment-free `key=value` lines in a fixed order. Two parameter sets
    /// produce the same text iff every value is equal (floats are written
    /// in shortest round-trip form).
    pub fn canonical_text(&self) -> String {
        KEYS.iter().map(|k| format!("{}={}\n", k.key, self.value_text(k.key))).collect()
    }

    /// Parse a parameter file. Every key must be present exactly once.
    /// Values are not validated here; call [`CompandParams::validate`].
    pub fn from_file_str(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Param(format!("line {lineno}: expected `key = value`")))?;
            let key = key.trim();
            let Some(known) = KEYS.iter().find(|k| k.key == key) else {
                return Err(Error::Param(format!("line {lineno}: unknown key `{key}`")));
            };
            if entries.insert(known.key, (lineno, value.trim())).is_some() {
                return Err(Error::Param(format!("line {lineno}: duplicate key `{key}`")));
            }
        }
        let missing: Vec<&str> = KEYS.iter().map(|k| k.key).filter(|k| !entries.contains_key(k)).collect();
        if !missing.is_empty() {
            let names = missing.iter().map(|k| format!("`{k}`")).collect::<Vec<_>>().join(", ");
            return Err(Error::Param(format!("missing key {names}")));
        }

        let get = |key: &str| entries[key];
        let num = |key: &str| -> Result<f64> {
            let (line, v) = get(key);
            v.parse::<f64>().map_err(|_| Error::Param(format!("line {line}: `{key}` expects a number, got `{v}`")))
        };
        let int = |key: &str| -> Result<usize> {
            let (line, v) = get(key);
            v.parse::<usize>()
                .map_err(|_| Error::Param(format!("line {line}: `{key}` expects a nonnegative integer, got `{v}`")))
        };
        let list = |key: &str| -> Result<Vec<f64>> {
            let (line, v) = get(key);
            if v.is_empty() {
                return Ok(Vec::new());
            }
            v.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Param(format!("line {line}: `{key}` has non-numeric entry `{}`", s.trim())))
                })
                .collect()
        };

        let (mode_line, mode_text) = get("mode");
        let mode = mode_text.parse::<Mode>().map_err(|e| Error::Param(format!("line {mode_line}: {e}")))?;
        let (teeth_line, teeth_text) = get("teeth_level");
        let teeth_level = if teeth_text.eq_ignore_ascii_case("auto") {
            TeethLevel::Auto
        } else {
            TeethLevel::Fixed(teeth_text.parse::<usize>().map_err(|_| {
                Error::Param(format!(
                    "line {teeth_line}: `teeth_level` expects `auto` or an integer, got `{teeth_text}`"
                ))
            })?)
        };

        Ok(Self {
            hu_min_clip: num("hu_min_clip")?,
            hu_max_clip: num("hu_max_clip")?,
            soft_lo: num("soft_lo")?,
            soft_hi: num("soft_hi")?,
            v: num("v")?,
            c1: num("c1")?,
            c2: num("c2")?,
            srnd_radius: int("srnd_radius")?,
            levels: int("levels")?,
            kernel_a: num("kernel_a")?,
            mu: num("mu")?,
            w_n: list("w_n")?,
            teeth_level,
            amp_bone: num("amp_bone")?,
            amp_soft: num("amp_soft")?,
            lambda_bone: list("lambda_bone")?,
            lambda_soft: list("lambda_soft")?,
            alpha: num("alpha")?,
            beta: num("beta")?,
            offset: num("offset")?,
            r_max: num("r_max")?,
            epsilon: num("epsilon")?,
            lo_pct: num("lo_pct")?,
            hi_pct: num("hi_pct")?,
            mode,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert_eq!(CompandParams::default().violations(), vec![]);
    }

    #[test]
    fn beta_two_is_rejected() {
        let p = CompandParams { beta: 2.0, ..Default::default() };
        let errs = p.violations();
        assert!(errs.iter().any(|e| e.message.contains("beta must be 1")), "{errs:?}");
    }

    #[test]
    fn teeth_level_beyond_depth_is_rejected() {
        let p = CompandParams { teeth_level: TeethLevel::Fixed(5 + 3), ..Default::default() };
        let errs = p.violations();
        assert!(errs.iter().any(|e| e.message.contains("teeth level exceeds pyramid depth")), "{errs:?}");
    }

    #[test]
    fn reports_every_violation() {
        let p = CompandParams { beta: 2.0, mu: -1.0, epsilon: 0.0, lambda_soft: vec![1.0], ..Default::default() };
        let keys: Vec<_> = p.violations().iter().map(|e| e.key).collect();
        for k in ["beta", "mu", "epsilon", "lambda_soft"] {
            assert!(keys.contains(&k), "{k} missing from {keys:?}");
        }
    }

    #[test]
    fn r_max_must_match_constraint() {
        let p = CompandParams { alpha: 2.0, ..Default::default() };
        assert!(p.violations().iter().any(|e| e.key == "r_max"));
        let p = CompandParams { alpha: 2.0, r_max: 3.0, ..Default::default() };
        assert!(p.violations().is_empty());
    }

    #[test]
    fn default_v_is_soft_band_top() {
        let p = CompandParams::default();
        assert!((p.v - p.hu_to_unit(300.0)).abs() < 1e-15);
    }

    #[test]
    fn auto_teeth_level_matches_tooth_scale() {
        assert_eq!(auto_teeth_level((0.5, 0.5), 5), 4);
        assert_eq!(auto_teeth_level((1.0, 1.0), 5), 3);
        assert_eq!(auto_teeth_level((0.1, 0.1), 5), 5);
        assert_eq!(auto_teeth_level((40.0, 40.0), 5), 0);
    }

    #[test]
    fn file_round_trip() {
        let p = CompandParams { mu: 0.123456789012345, teeth_level: TeethLevel::Fixed(2), ..Default::default() };
        let back = CompandParams::from_file_str(&p.to_file_string()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn missing_key_is_named() {
        let text = CompandParams::default().to_file_string();
        let stripped: String =
            text.lines().filter(|l| !l.starts_with("lambda_soft")).map(|l| format!("{l}\n")).collect();
        let err = CompandParams::from_file_str(&stripped).unwrap_err().to_string();
        assert!(err.contains("lambda_soft"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let mut text = CompandParams::default().to_file_string();
        text.push_str("bogus line\n");
        let n = text.lines().count();
        let err = CompandParams::from_file_str(&text).unwrap_err().to_string();
        assert!(err.contains(&format!("line {n}")), "{err}");
    }

    #[test]
    fn with_levels_resizes_vectors() {
        let p = CompandParams::default().with_levels(3);
        assert!(p.violations().is_empty());
        assert_eq!(p.lambda_bone.len(), 4);
        let p = CompandParams::default().with_levels(7);
        assert!(p.violations().is_empty());
        assert_eq!(p.w_n.len(), 7);
    }
}
