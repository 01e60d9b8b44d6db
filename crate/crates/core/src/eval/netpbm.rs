//! Binary PGM (`P5`) and grayscale PFM (`Pf`) codecs.
//!
//! * PGM: `P5`, ASCII width, height and maxval separated by whitespace
//!   (`#` comments allowed), one whitespace byte, then samples: one byte
//!   each for maxval < 256, otherwise two bytes big-endian.
//! * PFM: `Pf\n{w} {h}\n{scale}\n` then 32-bit floats, little-endian when
//!   `scale < 0`, rows stored bottom-to-top. The writer always emits
//!   `-1.0`.
//!
//! Disparity maps are stored either as PFM in pixels with `+inf` for invalid
//! pixels, or as 16-bit PGM holding the raw 1/32-pixel fixed-point codes.

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::pixel::{BitDepth, DisparityMap, FloatDisparityMap, GrayImage, PixelError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed header at byte {offset}: {reason}")]
    Header { offset: usize, reason: String },
    #[error("truncated payload at byte {offset}: expected {expected} bytes, found {found}")]
    Truncated {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("sample {value} at byte {offset} exceeds maxval {maxval}")]
    SampleRange {
        offset: usize,
        value: u16,
        maxval: u16,
    },
    #[error("bit depth mismatch: file maxval {maxval} is {found}-bit, expected {expected}-bit")]
    BitDepthMismatch {
        maxval: u16,
        found: u8,
        expected: u8,
    },
    #[error(transparent)]
    Pixel(#[from] PixelError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

struct HeaderReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn err<T>(&self, reason: impl Into<String>) -> Result<T, FormatError> {
        Err(FormatError::Header {
            offset: self.pos,
            reason: reason.into(),
        })
    }

    fn magic(&mut self, expected: &[u8; 2]) -> Result<(), FormatError> {
        if self.data.len() < 2 || &self.data[..2] != expected {
            return self.err(format!(
                "expected magic {:?}",
                std::str::from_utf8(expected).unwrap_or("??")
            ));
        }
        self.pos = 2;
        Ok(())
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a str, FormatError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self
            .data
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("unexpected end of header");
        }
        std::str::from_utf8(&self.data[start..self.pos]).or_else(|_| {
            self.pos = start;
            self.err("non-ASCII header token")
        })
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, FormatError> {
        let start = self.pos;
        let tok = self.token()?;
        tok.parse().or_else(|_| {
            self.pos = start;
            self.skip_space_and_comments();
            self.err(format!("invalid {what} {tok:?}"))
        })
    }

    /// Consumes the single whitespace byte that ends a header.
    fn end_of_header(&mut self) -> Result<usize, FormatError> {
        match self.data.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(self.pos)
            }
            _ => self.err("expected whitespace after header"),
        }
    }
}

fn payload(data: &[u8], offset: usize, expected: usize) -> Result<&[u8], FormatError> {
    let found = data.len().saturating_sub(offset);
    if found < expected {
        return Err(FormatError::Truncated {
            offset,
            expected,
            found,
        });
    }
    Ok(&data[offset..offset + expected])
}

fn depth_for_maxval(maxval: u16) -> BitDepth {
    match maxval {
        0..=0xff => BitDepth::Eight,
        0x100..=0x3ff => BitDepth::Ten,
        _ => BitDepth::Sixteen,
    }
}

/// Decodes a binary PGM. With `expected` set, the file's bit depth (derived
/// from its maxval) must match.
pub fn read_pgm(data: &[u8], expected: Option<BitDepth>) -> Result<GrayImage, FormatError> {
    let mut r = HeaderReader::new(data);
    r.magic(b"P5")?;
    let width: usize = r.number("width")?;
    let height: usize = r.number("height")?;
    let maxval_pos = r.pos;
    let maxval: u32 = r.number("maxval")?;
    if maxval == 0 || maxval > 0xffff {
        r.pos = maxval_pos;
        r.skip_space_and_comments();
        return r.err(format!("maxval {maxval} outside 1..=65535"));
    }
    let maxval = maxval as u16;
    let start = r.end_of_header()?;
    let depth = depth_for_maxval(maxval);
    if let Some(want) = expected {
        if want != depth {
            return Err(FormatError::BitDepthMismatch {
                maxval,
                found: depth.bits(),
                expected: want.bits(),
            });
        }
    }
    let n = width * height;
    let samples: Vec<u16> = if maxval < 256 {
        payload(data, start, n)?
            .iter()
            .map(|&b| u16::from(b))
            .collect()
    } else {
        payload(data, start, 2 * n)?
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    let bytes_per = if maxval < 256 { 1 } else { 2 };
    if let Some((i, &value)) = samples.iter().enumerate().find(|(_, &v)| v > maxval) {
        return Err(FormatError::SampleRange {
            offset: start + i * bytes_per,
            value,
            maxval,
        });
    }
    Ok(GrayImage::new(width, height, depth, samples)?)
}

/// Encodes a binary PGM with maxval `2^bits - 1`.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let maxval = img.bit_depth().max_value();
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    if maxval < 256 {
        out.extend(img.samples().iter().map(|&v| v as u8));
    } else {
        for &v in img.samples() {
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    out
}

/// Decodes a grayscale PFM into a real-valued map (top row first).
pub fn read_pfm(data: &[u8]) -> Result<FloatDisparityMap, FormatError> {
    let mut r = HeaderReader::new(data);
    r.magic(b"Pf")?;
    let width: usize = r.number("width")?;
    let height: usize = r.number("height")?;
    let scale_pos = r.pos;
    let scale: f64 = r.number("scale")?;
    if scale == 0.0 || !scale.is_finite() {
        r.pos = scale_pos;
        r.skip_space_and_comments();
        return r.err("scale must be a non-zero finite number");
    }
    let start = r.end_of_header()?;
    let raw = payload(data, start, 4 * width * height)?;
    let little = scale < 0.0;
    let mut values = vec![0.0f64; width * height];
    for (i, c) in raw.chunks_exact(4).enumerate() {
        let bytes = [c[0], c[1], c[2], c[3]];
        let v = if little {
            f32::from_le_bytes(bytes)
        } else {
            f32::from_be_bytes(bytes)
        };
        let (row, col) = (i / width.max(1), i % width.max(1));
        values[(height - 1 - row) * width + col] = f64::from(v);
    }
    Ok(FloatDisparityMap::new(width, height, values)?)
}

/// Encodes a map as little-endian PFM, rows bottom-to-top, values as `f32`.
pub fn write_pfm(map: &FloatDisparityMap) -> Vec<u8> {
    let (w, h) = (map.width(), map.height());
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(4 * w * h);
    for y in (0..h).rev() {
        for x in 0..w {
            out.extend_from_slice(&(map.get(x, y) as f32).to_le_bytes());
        }
    }
    out
}

/// Raw fixed-point codes as a 16-bit image.
pub fn disparity_to_pgm(map: &DisparityMap) -> GrayImage {
    GrayImage::new(
        map.width(),
        map.height(),
        BitDepth::Sixteen,
        map.values().to_vec(),
    )
    .expect("any u16 fits in 16 bits")
}

/// Fixed-point disparity map from a 16-bit code image.
pub fn pgm_to_disparity(img: &GrayImage) -> DisparityMap {
    DisparityMap::new(img.width(), img.height(), img.samples().to_vec())
        .expect("dimensions carried over")
}

fn read_file(path: &Path) -> Result<Vec<u8>, FormatError> {
    fs::read(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `bytes` next to `path` and renames it into place, so readers never
/// observe a partially written file.
pub fn write_file_atomic(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    let io_err = |source| FormatError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err)
}

pub fn load_pgm(path: &Path, expected: Option<BitDepth>) -> Result<GrayImage, FormatError> {
    read_pgm(&read_file(path)?, expected)
}

pub fn save_pgm(path: &Path, img: &GrayImage) -> Result<(), FormatError> {
    write_file_atomic(path, &write_pgm(img))
}

pub fn load_pfm(path: &Path) -> Result<FloatDisparityMap, FormatError> {
    read_pfm(&read_file(path)?)
}

pub fn save_pfm(path: &Path, map: &FloatDisparityMap) -> Result<(), FormatError> {
    write_file_atomic(path, &write_pfm(map))
}

/// Loads a disparity map from PFM (pixels, non-finite or non-positive values
/// invalid) or 16-bit PGM (fixed-point codes), chosen by the file's magic.
pub fn load_disparity(path: &Path) -> Result<DisparityMap, FormatError> {
    let data = read_file(path)?;
    if data.starts_with(b"P5") {
        Ok(pgm_to_disparity(&read_pgm(&data, Some(BitDepth::Sixteen))?))
    } else {
        Ok(read_pfm(&data)?.to_fixed())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_built_pfm_decodes() {
        // 2x2, little-endian; file rows are bottom-to-top.
        let mut bytes = b"Pf\n2 2\n-1.0\n".to_vec();
        for v in [3.0f32, 4.0, 1.0, 2.0] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let m = read_pfm(&bytes).unwrap();
        assert_eq!(m.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(write_pfm(&m), bytes);
    }

    #[test]
    fn big_endian_pfm() {
        let mut bytes = b"Pf\n1 2\n1.0\n".to_vec();
        for v in [7.5f32, -2.25] {
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        assert_eq!(read_pfm(&bytes).unwrap().values(), &[-2.25, 7.5]);
    }

    #[test]
    fn pgm_sixteen_bit_is_big_endian() {
        let img = GrayImage::new(2, 1, BitDepth::Sixteen, vec![0x0102, 0xfffe]).unwrap();
        let bytes = write_pgm(&img);
        assert_eq!(&bytes[..], b"P5\n2 1\n65535\n\x01\x02\xff\xfe");
        assert_eq!(read_pgm(&bytes, None).unwrap(), img);
    }

    #[test]
    fn pgm_header_with_comments() {
        let bytes = b"P5 # made by hand\n3 # width\n1\n255\n\x01\x02\x03";
        let img = read_pgm(bytes, Some(BitDepth::Eight)).unwrap();
        assert_eq!(img.samples(), &[1, 2, 3]);
    }

    #[test]
    fn pgm_errors_carry_offsets() {
        let bytes = b"P5\n2 2\n255\n\x00\x01";
        match read_pgm(bytes, None) {
            Err(FormatError::Truncated {
                offset,
                expected,
                found,
            }) => assert_eq!((offset, expected, found), (11, 4, 2)),
            other => panic!("{other:?}"),
        }
        match read_pgm(b"P5\n2 x\n255\n", None) {
            Err(FormatError::Header { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            read_pgm(b"P6\n1 1\n255\n\x00", None),
            Err(FormatError::Header { offset: 0, .. })
        ));
        assert!(matches!(
            read_pgm(b"P5\n1 1\n255\n\x00", Some(BitDepth::Sixteen)),
            Err(FormatError::BitDepthMismatch { maxval: 255, .. })
        ));
        assert!(matches!(
            read_pgm(b"P5\n1 1\n100\n\x65", None),
            Err(FormatError::SampleRange { offset: 11, .. })
        ));
    }

    #[test]
    fn ten_bit_maxval() {
        let img = GrayImage::new(2, 1, BitDepth::Ten, vec![1023, 7]).unwrap();
        let bytes = write_pgm(&img);
        assert!(bytes.starts_with(b"P5\n2 1\n1023\n"));
        assert_eq!(read_pgm(&bytes, Some(BitDepth::Ten)).unwrap(), img);
    }

    #[test]
    fn disparity_through_pfm_keeps_sentinel() {
        let map = DisparityMap::new(3, 1, vec![0, 645, 2032]).unwrap();
        let back = read_pfm(&write_pfm(&map.to_float())).unwrap();
        assert!(back.get(0, 0).is_infinite());
        assert_eq!(back.to_fixed(), map);
        assert_eq!(pgm_to_disparity(&disparity_to_pgm(&map)), map);
    }
}
