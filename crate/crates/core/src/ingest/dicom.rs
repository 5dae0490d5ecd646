//! Minimal DICOM Part 10 reader for single-frame grayscale CT slices stored
//! with an uncompressed little-endian transfer syntax (implicit or explicit
//! VR). Anything else is rejected with [`Error::Format`].

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::slice::HuSlice;

pub const IMPLICIT_VR_LE: &str = "1.2.840.10008.1.2";
pub const EXPLICIT_VR_LE: &str = "1.2.840.10008.1.2.1";

const TRANSFER_SYNTAX: Tag = Tag(0x0002, 0x0010);
const SAMPLES_PER_PIXEL: Tag = Tag(0x0028, 0x0002);
const PHOTOMETRIC: Tag = Tag(0x0028, 0x0004);
const NUMBER_OF_FRAMES: Tag = Tag(0x0028, 0x0008);
const ROWS: Tag = Tag(0x0028, 0x0010);
const COLUMNS: Tag = Tag(0x0028, 0x0011);
const PIXEL_SPACING: Tag = Tag(0x0028, 0x0030);
const BITS_ALLOCATED: Tag = Tag(0x0028, 0x0100);
const BITS_STORED: Tag = Tag(0x0028, 0x0101);
const PIXEL_REPRESENTATION: Tag = Tag(0x0028, 0x0103);
const RESCALE_INTERCEPT: Tag = Tag(0x0028, 0x1052);
const RESCALE_SLOPE: Tag = Tag(0x0028, 0x1053);
const PIXEL_DATA: Tag = Tag(0x7FE0, 0x0010);
const ITEM: Tag = Tag(0xFFFE, 0xE000);
const ITEM_DELIM: Tag = Tag(0xFFFE, 0xE00D);
const SEQ_DELIM: Tag = Tag(0xFFFE, 0xE0DD);

const UNDEFINED: u32 = 0xFFFF_FFFF;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Tag(u16, u16);

/// Image-pixel metadata relevant to HU conversion.
#[derive(Clone, Debug, PartialEq)]
pub struct DicomSliceMeta {
    pub rescale_slope: f64,
    pub rescale_intercept: f64,
    pub pixel_spacing_mm: (f64, f64),
    pub rows: usize,
    pub cols: usize,
    pub bits_stored: u16,
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    explicit: bool,
}

struct Element<'a> {
    tag: Tag,
    vr: Option<[u8; 2]>,
    value: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format(format!("DICOM stream truncated at byte {} (need {n} more)", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn at_end(&self) -> bool {
        self.pos >= self.buf.len()
    }

    fn peek_group(&self) -> Option<u16> {
        self.buf.get(self.pos..self.pos + 2).map(|b| u16::from_le_bytes([b[0], b[1]]))
    }

    fn tag(&mut self) -> Result<Tag> {
        Ok(Tag(self.u16()?, self.u16()?))
    }

    /// Read the next element header and value. Sequences and items of
    /// undefined length are skipped and returned with an empty value.
    fn element(&mut self) -> Result<Element<'a>> {
        let tag = self.tag()?;
        if tag.0 == 0xFFFE {
            let len = self.u32()?;
            return Ok(Element { tag, vr: None, value: self.value(len, tag)? });
        }
        let (vr, len) = if self.explicit {
            let vr: [u8; 2] = self.take(2)?.try_into().expect("2 bytes");
            let len = if long_form(&vr) {
                self.take(2)?;
                self.u32()?
            } else {
                self.u16()? as u32
            };
            (Some(vr), len)
        } else {
            (None, self.u32()?)
        };
        if len == UNDEFINED {
            if tag == PIXEL_DATA {
                return Err(Error::Format("encapsulated (compressed) pixel data is not supported".into()));
            }
            self.skip_undefined_sequence()?;
            return Ok(Element { tag, vr, value: &[] });
        }
        Ok(Element { tag, vr, value: self.value(len, tag)? })
    }

    fn value(&mut self, len: u32, tag: Tag) -> Result<&'a [u8]> {
        if len == UNDEFINED {
            if tag == ITEM {
                self.skip_undefined_item()?;
                return Ok(&[]);
            }
            return Err(Error::Format(format!("unexpected undefined length for ({:04X},{:04X})", tag.0, tag.1)));
        }
        self.take(len as usize)
    }

    fn skip_undefined_sequence(&mut self) -> Result<()> {
        loop {
            let el = self.element()?;
            match el.tag {
                SEQ_DELIM => return Ok(()),
                ITEM => {}
                other => {
                    return Err(Error::Format(format!("unexpected ({:04X},{:04X}) inside sequence", other.0, other.1)));
                }
            }
        }
    }

    fn skip_undefined_item(&mut self) -> Result<()> {
        loop {
            if self.element()?.tag == ITEM_DELIM {
                return Ok(());
            }
        }
    }
}

fn long_form(vr: &[u8; 2]) -> bool {
    matches!(vr, b"OB" | b"OD" | b"OF" | b"OL" | b"OV" | b"OW" | b"SQ" | b"SV" | b"UC" | b"UN" | b"UR" | b"UT" | b"UV")
}

fn text(value: &[u8]) -> String {
    String::from_utf8_lossy(value).trim_matches(|c: char| c == '\0' || c.is_whitespace()).to_string()
}

fn us(value: &[u8], name: &str) -> Result<u16> {
    value.get(..2).map(|b| u16::from_le_bytes([b[0], b[1]])).ok_or_else(|| Error::Metadata(format!("{name} is empty")))
}

fn decimal_list(value: &[u8], name: &str) -> Result<Vec<f64>> {
    text(value)
        .split('\\')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Metadata(format!("{name}: `{s}` is not a number"))))
        .collect()
}

fn decimal(value: &[u8], name: &str) -> Result<f64> {
    decimal_list(value, name)?.first().copied().ok_or_else(|| Error::Metadata(format!("{name} is empty")))
}

#[derive(Default)]
struct Fields<'a> {
    samples_per_pixel: Option<u16>,
    photometric: Option<String>,
    frames: Option<String>,
    rows: Option<u16>,
    cols: Option<u16>,
    spacing: Option<Vec<f64>>,
    bits_allocated: Option<u16>,
    bits_stored: Option<u16>,
    signed: Option<u16>,
    intercept: Option<f64>,
    slope: Option<f64>,
    pixels: Option<&'a [u8]>,
}

/// Parse a DICOM file held in memory.
pub fn parse_dicom(bytes: &[u8], source_id: &str) -> Result<(HuSlice, DicomSliceMeta)> {
    if bytes.len() < 132 || &bytes[128..132] != b"DICM" {
        return Err(Error::Format("not a DICOM Part 10 file (missing DICM prefix)".into()));
    }
    let mut r = Reader { buf: bytes, pos: 132, explicit: true };

    let mut syntax = None;
    while r.peek_group() == Some(0x0002) {
        let el = r.element()?;
        if el.tag == TRANSFER_SYNTAX {
            syntax = Some(text(el.value));
        }
    }
    let syntax = syntax.ok_or_else(|| Error::Format("file meta lacks a transfer syntax".into()))?;
    r.explicit = match syntax.as_str() {
        EXPLICIT_VR_LE => true,
        IMPLICIT_VR_LE => false,
        other => return Err(Error::Format(format!("transfer syntax {other} is not supported"))),
    };

    let mut f = Fields::default();
    while !r.at_end() {
        let el = r.element()?;
        let v = el.value;
        match el.tag {
            SAMPLES_PER_PIXEL => f.samples_per_pixel = Some(us(v, "SamplesPerPixel")?),
            PHOTOMETRIC => f.photometric = Some(text(v)),
            NUMBER_OF_FRAMES => f.frames = Some(text(v)),
            ROWS => f.rows = Some(us(v, "Rows")?),
            COLUMNS => f.cols = Some(us(v, "Columns")?),
            PIXEL_SPACING => f.spacing = Some(decimal_list(v, "PixelSpacing")?),
            BITS_ALLOCATED => f.bits_allocated = Some(us(v, "BitsAllocated")?),
            BITS_STORED => f.bits_stored = Some(us(v, "BitsStored")?),
            PIXEL_REPRESENTATION => f.signed = Some(us(v, "PixelRepresentation")?),
            RESCALE_INTERCEPT => f.intercept = Some(decimal(v, "RescaleIntercept")?),
            RESCALE_SLOPE => f.slope = Some(decimal(v, "RescaleSlope")?),
            PIXEL_DATA => {
                if el.vr.is_some_and(|vr| &vr == b"SQ") {
                    return Err(Error::Format("pixel data encoded as a sequence".into()));
                }
                f.pixels = Some(v);
                break;
            }
            _ => {}
        }
    }
    build_slice(f, source_id)
}

fn build_slice(f: Fields<'_>, source_id: &str) -> Result<(HuSlice, DicomSliceMeta)> {
    if f.samples_per_pixel.unwrap_or(1) != 1 {
        return Err(Error::Format("color images are not supported".into()));
    }
    if let Some(p) = &f.photometric {
        if p != "MONOCHROME1" && p != "MONOCHROME2" {
            return Err(Error::Format(format!("photometric interpretation {p} is not grayscale")));
        }
    }
    if let Some(frames) = &f.frames {
        if frames.parse::<u32>().map_or(true, |n| n > 1) {
            return Err(Error::Format(format!("multi-frame images are not supported (NumberOfFrames = {frames})")));
        }
    }
    let rows = f.rows.ok_or_else(|| Error::Metadata("missing Rows".into()))? as usize;
    let cols = f.cols.ok_or_else(|| Error::Metadata("missing Columns".into()))? as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::Metadata(format!("empty image {cols}x{rows}")));
    }
    let slope = f.slope.ok_or_else(|| Error::Metadata("missing RescaleSlope (0028,1053)".into()))?;
    let intercept = f.intercept.ok_or_else(|| Error::Metadata("missing RescaleIntercept (0028,1052)".into()))?;
    if slope == 0.0 || !slope.is_finite() || !intercept.is_finite() {
        return Err(Error::Metadata(format!("invalid rescale slope {slope} / intercept {intercept}")));
    }
    let allocated = f.bits_allocated.ok_or_else(|| Error::Metadata("missing BitsAllocated".into()))?;
    let stored = f.bits_stored.unwrap_or(allocated);
    if stored == 0 || stored > allocated {
        return Err(Error::Metadata(format!("BitsStored {stored} incompatible with BitsAllocated {allocated}")));
    }
    let signed = f.signed.unwrap_or(0) == 1;
    let pixels = f.pixels.ok_or_else(|| Error::Format("no pixel data".into()))?;

    let n = rows * cols;
    let raw: Vec<u32> = match allocated {
        8 if pixels.len() >= n => pixels[..n].iter().map(|&b| b as u32).collect(),
        16 if pixels.len() >= 2 * n => {
            pixels.chunks_exact(2).take(n).map(|c| u16::from_le_bytes([c[0], c[1]]) as u32).collect()
        }
        8 | 16 => {
            return Err(Error::Format(format!(
                "pixel data holds {} bytes, {cols}x{rows} image needs more",
                pixels.len()
            )));
        }
        other => return Err(Error::Format(format!("BitsAllocated {other} is not supported"))),
    };

    let mask = (1u32 << stored) - 1;
    let values = raw
        .into_iter()
        .map(|word| {
            let v = word & mask;
            let stored_value =
                if signed && v & (1 << (stored - 1)) != 0 { v as i64 - (1i64 << stored) } else { v as i64 };
            stored_value as f64 * slope + intercept
        })
        .collect();

    let spacing = match f.spacing.as_deref() {
        Some([r, c, ..]) => (*r, *c),
        Some([s]) => (*s, *s),
        _ => (1.0, 1.0),
    };
    let meta = DicomSliceMeta {
        rescale_slope: slope,
        rescale_intercept: intercept,
        pixel_spacing_mm: spacing,
        rows,
        cols,
        bits_stored: stored,
    };
    let slice = HuSlice::new(Grid::new(cols, rows, values)?, spacing, source_id)?;
    Ok((slice, meta))
}

pub fn load_dicom_slice(path: impl AsRef<Path>) -> Result<HuSlice> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_dicom(&bytes, &super::source_id(path))?.0)
}
