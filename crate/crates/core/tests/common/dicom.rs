//! Minimal DICOM Part 10 writer (uncompressed little endian, 16 bits
//! allocated) used as an oracle for the reader.
#![allow(dead_code)]

use ct_compand::ingest::dicom::EXPLICIT_VR_LE;

fn pad(mut v: Vec<u8>, fill: u8) -> Vec<u8> {
    if v.len() % 2 == 1 {
        v.push(fill);
    }
    v
}

pub struct Writer {
    pub out: Vec<u8>,
    pub explicit: bool,
}

impl Writer {
    pub fn new(syntax: &str) -> Self {
        let mut w = Writer { out: vec![0; 128], explicit: true };
        w.out.extend_from_slice(b"DICM");
        let uid = pad(syntax.as_bytes().to_vec(), 0);
        w.element(0x0002, 0x0010, b"UI", &uid);
        w.explicit = syntax == EXPLICIT_VR_LE;
        w
    }

    pub fn element(&mut self, group: u16, elem: u16, vr: &[u8; 2], value: &[u8]) {
        self.out.extend_from_slice(&group.to_le_bytes());
        self.out.extend_from_slice(&elem.to_le_bytes());
        if self.explicit {
            self.out.extend_from_slice(vr);
            if matches!(vr, b"OB" | b"OW" | b"SQ" | b"UN") {
                self.out.extend_from_slice(&[0, 0]);
                self.out.extend_from_slice(&(value.len() as u32).to_le_bytes());
            } else {
                self.out.extend_from_slice(&(value.len() as u16).to_le_bytes());
            }
        } else {
            self.out.extend_from_slice(&(value.len() as u32).to_le_bytes());
        }
        self.out.extend_from_slice(value);
    }

    pub fn us(&mut self, group: u16, elem: u16, v: u16) {
        self.element(group, elem, b"US", &v.to_le_bytes());
    }

    pub fn text(&mut self, group: u16, elem: u16, vr: &[u8; 2], s: &str) {
        self.element(group, elem, vr, &pad(s.as_bytes().to_vec(), b' '));
    }
}

pub struct Image {
    pub rows: u16,
    pub cols: u16,
    pub bits_stored: u16,
    pub signed: bool,
    pub stored: Vec<i32>,
    pub slope: Option<&'static str>,
    pub intercept: Option<&'static str>,
    pub frames: Option<&'static str>,
    pub encapsulated: bool,
}

/// 16x16 signed 12-bit ramp from -1000 in steps of 10.
pub fn ramp() -> Image {
    Image {
        rows: 16,
        cols: 16,
        bits_stored: 12,
        signed: true,
        stored: (0..256).map(|i| i * 10 - 1000).collect(),
        slope: Some("1"),
        intercept: Some("0"),
        frames: None,
        encapsulated: false,
    }
}

pub fn write(syntax: &str, img: &Image) -> Vec<u8> {
    let mut w = Writer::new(syntax);
    // An unrelated undefined-length sequence the reader must skip.
    w.out.extend_from_slice(&0x0008u16.to_le_bytes());
    w.out.extend_from_slice(&0x1140u16.to_le_bytes());
    if w.explicit {
        w.out.extend_from_slice(b"SQ\0\0");
    }
    w.out.extend_from_slice(&0xFFFF_FFFFu32.to_le_bytes());
    w.out.extend_from_slice(&[0xFE, 0xFF, 0x00, 0xE0, 0, 0, 0, 0]);
    w.out.extend_from_slice(&[0xFE, 0xFF, 0xDD, 0xE0, 0, 0, 0, 0]);

    w.us(0x0028, 0x0002, 1);
    w.text(0x0028, 0x0004, b"CS", "MONOCHROME2");
    if let Some(f) = img.frames {
        w.text(0x0028, 0x0008, b"IS", f);
    }
    w.us(0x0028, 0x0010, img.rows);
    w.us(0x0028, 0x0011, img.cols);
    w.text(0x0028, 0x0030, b"DS", "0.5\\0.75");
    w.us(0x0028, 0x0100, 16);
    w.us(0x0028, 0x0101, img.bits_stored);
    w.us(0x0028, 0x0102, img.bits_stored - 1);
    w.us(0x0028, 0x0103, img.signed as u16);
    if let Some(i) = img.intercept {
        w.text(0x0028, 0x1052, b"DS", i);
    }
    if let Some(s) = img.slope {
        w.text(0x0028, 0x1053, b"DS", s);
    }
    let mask = ((1u32 << img.bits_stored) - 1) as u16;
    let data: Vec<u8> = img.stored.iter().flat_map(|v| (*v as u16 & mask).to_le_bytes()).collect();
    if img.encapsulated {
        w.out.extend_from_slice(&[0xE0, 0x7F, 0x10, 0x00]);
        if w.explicit {
            w.out.extend_from_slice(b"OB\0\0");
        }
        w.out.extend_from_slice(&0xFFFF_FFFFu32.to_le_bytes());
    } else {
        w.element(0x7FE0, 0x0010, b"OW", &data);
    }
    w.out
}
