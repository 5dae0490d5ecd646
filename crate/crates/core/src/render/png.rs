//! Grayscale, non-interlaced PNG output.

use std::path::Path;

use crate::error::{Error, Result};
use crate::slice::{BitDepth, LdrImage};

pub fn encode_png(img: &LdrImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = ::png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(::png::ColorType::Grayscale);
        let data: Vec<u8> = match img.bit_depth() {
            BitDepth::Eight => {
                enc.set_depth(::png::BitDepth::Eight);
                img.values().iter().map(|&v| v as u8).collect()
            }
            BitDepth::Sixteen => {
                enc.set_depth(::png::BitDepth::Sixteen);
                img.values().iter().flat_map(|v| v.to_be_bytes()).collect()
            }
        };
        let mut writer = enc.write_header().map_err(|e| Error::Png(e.to_string()))?;
        writer.write_image_data(&data).map_err(|e| Error::Png(e.to_string()))?;
        writer.finish().map_err(|e| Error::Png(e.to_string()))?;
    }
    Ok(out)
}

pub fn write_png(path: impl AsRef<Path>, img: &LdrImage) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_png(img)?).map_err(|e| Error::io(path, e))
}

/// Decode a grayscale PNG written by [`encode_png`].
pub fn decode_png(bytes: &[u8]) -> Result<LdrImage> {
    let decoder = ::png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| Error::Png(e.to_string()))?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or_else(|| Error::Png("image too large".into()))?];
    let info = reader.next_frame(&mut buf).map_err(|e| Error::Png(e.to_string()))?;
    if info.color_type != ::png::ColorType::Grayscale {
        return Err(Error::Format(format!("expected grayscale PNG, got {:?}", info.color_type)));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let buf = &buf[..info.buffer_size()];
    let (values, depth) = match info.bit_depth {
        ::png::BitDepth::Eight => (buf.iter().map(|&b| b as u16).collect(), BitDepth::Eight),
        ::png::BitDepth::Sixteen => {
            (buf.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect(), BitDepth::Sixteen)
        }
        other => return Err(Error::Format(format!("unsupported PNG bit depth {other:?}"))),
    };
    LdrImage::new(w, h, values, depth)
}
