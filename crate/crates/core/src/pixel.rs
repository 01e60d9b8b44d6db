//! Raster and disparity containers shared by every stage of the pipeline.
//!
//! Disparities are stored in 1/32-pixel fixed point (5 fractional bits) with
//! `0` reserved as the invalid sentinel. A true disparity of zero (a point at
//! infinity) therefore cannot be represented; [`float_to_fixed`] clamps it to
//! the smallest valid code.

use thiserror::Error;

/// Number of fixed-point steps per pixel of disparity.
pub const SUBPIXEL_SCALE: u16 = 32;
/// Fractional bits carried by a fixed-point disparity.
pub const SUBPIXEL_BITS: u32 = 5;
/// Sentinel marking a pixel without a disparity.
pub const INVALID_DISPARITY: u16 = 0;
/// Smallest stored value of a valid disparity (1/32 px).
pub const MIN_VALID_FIXED: u16 = 1;
/// Largest value the matcher can emit: 63 px plus a half-pixel subpixel offset.
pub const MAX_VALID_FIXED: u16 = 63 * SUBPIXEL_SCALE + SUBPIXEL_SCALE / 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PixelError {
    #[error("unsupported bit depth {0}; expected 8, 10 or 16")]
    BitDepth(u8),
    #[error("sample buffer holds {actual} values but {width}x{height} needs {expected}")]
    Length {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("sample {value} at index {index} does not fit in {bits} bits")]
    SampleRange { index: usize, value: u16, bits: u8 },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

/// Sample precision of a [`GrayImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitDepth {
    Eight,
    Ten,
    Sixteen,
}

impl BitDepth {
    pub fn from_bits(bits: u8) -> Result<Self, PixelError> {
        match bits {
            8 => Ok(Self::Eight),
            10 => Ok(Self::Ten),
            16 => Ok(Self::Sixteen),
            other => Err(PixelError::BitDepth(other)),
        }
    }

    pub fn bits(self) -> u8 {
        match self {
            Self::Eight => 8,
            Self::Ten => 10,
            Self::Sixteen => 16,
        }
    }

    /// Largest representable sample, `2^bits - 1`.
    pub fn max_value(self) -> u16 {
        match self {
            Self::Eight => 0xff,
            Self::Ten => 0x3ff,
            Self::Sixteen => 0xffff,
        }
    }
}

/// Rectified monochrome raster. Ten-bit data lives in 16-bit containers
/// without rescaling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    bit_depth: BitDepth,
    samples: Vec<u16>,
}

impl GrayImage {
    pub fn new(
        width: usize,
        height: usize,
        bit_depth: BitDepth,
        samples: Vec<u16>,
    ) -> Result<Self, PixelError> {
        check_len(width, height, samples.len())?;
        let max = bit_depth.max_value();
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, &v)| v > max) {
            return Err(PixelError::SampleRange {
                index,
                value,
                bits: bit_depth.bits(),
            });
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            samples,
        })
    }

    /// Image with every sample set to `value` (clamped to the bit depth).
    pub fn filled(width: usize, height: usize, bit_depth: BitDepth, value: u16) -> Self {
        Self {
            width,
            height,
            bit_depth,
            samples: vec![value.min(bit_depth.max_value()); width * height],
        }
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        bit_depth: BitDepth,
        mut f: impl FnMut(usize, usize) -> u16,
    ) -> Self {
        let max = bit_depth.max_value();
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y).min(max));
            }
        }
        Self {
            width,
            height,
            bit_depth,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> BitDepth {
        self.bit_depth
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u16> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.samples[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[u16] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }
}

/// Converts a stored fixed-point disparity to pixels.
#[inline]
pub fn fixed_to_float(v: u16) -> f64 {
    f64::from(v) / f64::from(SUBPIXEL_SCALE)
}

/// Rounds a disparity in pixels to the nearest 1/32 step. Results are clamped
/// to `[1, MAX_VALID_FIXED]` so the sentinel is never produced.
#[inline]
pub fn float_to_fixed(d: f64) -> u16 {
    let scaled = (d * f64::from(SUBPIXEL_SCALE)).round();
    if scaled.is_nan() || scaled < f64::from(MIN_VALID_FIXED) {
        MIN_VALID_FIXED
    } else if scaled > f64::from(MAX_VALID_FIXED) {
        MAX_VALID_FIXED
    } else {
        scaled as u16
    }
}

/// Fixed-point disparity map, `0` meaning invalid.
///
/// The matcher only ever writes values in `[1, MAX_VALID_FIXED]`; the
/// container itself accepts any `u16` so maps loaded from disk or produced by
/// host-side filters round-trip unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    values: Vec<u16>,
}

impl DisparityMap {
    pub fn new(width: usize, height: usize, values: Vec<u16>) -> Result<Self, PixelError> {
        check_len(width, height, values.len())?;
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Map with every pixel invalid.
    pub fn invalid(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![INVALID_DISPARITY; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [u16] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u16) {
        self.values[y * self.width + x] = v;
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.get(x, y) != INVALID_DISPARITY
    }

    /// Disparity in pixels, `None` for the sentinel.
    pub fn disparity_px(&self, x: usize, y: usize) -> Option<f64> {
        match self.get(x, y) {
            INVALID_DISPARITY => None,
            v => Some(fixed_to_float(v)),
        }
    }

    /// Disparity rounded to whole pixels, `None` for the sentinel.
    pub fn integer_at(&self, x: usize, y: usize) -> Option<u16> {
        match self.get(x, y) {
            INVALID_DISPARITY => None,
            v => Some((v + SUBPIXEL_SCALE / 2) / SUBPIXEL_SCALE),
        }
    }

    pub fn valid_count(&self) -> usize {
        self.values
            .iter()
            .filter(|&&v| v != INVALID_DISPARITY)
            .count()
    }

    pub fn validity_mask(&self) -> ValidityMask {
        ValidityMask {
            width: self.width,
            height: self.height,
            bits: self
                .values
                .iter()
                .map(|&v| v != INVALID_DISPARITY)
                .collect(),
        }
    }

    /// Copy of the map with every pixel outside `mask` set invalid.
    pub fn masked(&self, mask: &ValidityMask) -> Result<Self, PixelError> {
        if mask.width != self.width || mask.height != self.height {
            return Err(PixelError::DimensionMismatch(
                self.width,
                self.height,
                mask.width,
                mask.height,
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&mask.bits)
            .map(|(&v, &keep)| if keep { v } else { INVALID_DISPARITY })
            .collect();
        Ok(Self {
            width: self.width,
            height: self.height,
            values,
        })
    }
}

/// One boolean per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl ValidityMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, PixelError> {
        check_len(width, height, bits.len())?;
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn all(width: usize, height: usize, value: bool) -> Self {
        Self {
            width,
            height,
            bits: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &ValidityMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// Real-valued disparity map in pixels; `+inf` marks pixels without ground
/// truth.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatDisparityMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl FloatDisparityMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, PixelError> {
        check_len(width, height, values.len())?;
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Fixed-point disparity map: finite positive values are rounded to
    /// 1/32 px, everything else becomes invalid.
    pub fn to_fixed(&self) -> DisparityMap {
        let values = self
            .values
            .iter()
            .map(|&d| {
                if d.is_finite() && d > 0.0 {
                    float_to_fixed(d)
                } else {
                    INVALID_DISPARITY
                }
            })
            .collect();
        DisparityMap {
            width: self.width,
            height: self.height,
            values,
        }
    }
}

impl DisparityMap {
    /// Real-valued view with `+inf` at invalid pixels.
    pub fn to_float(&self) -> FloatDisparityMap {
        FloatDisparityMap {
            width: self.width,
            height: self.height,
            values: self
                .values
                .iter()
                .map(|&v| {
                    if v == INVALID_DISPARITY {
                        f64::INFINITY
                    } else {
                        fixed_to_float(v)
                    }
                })
                .collect(),
        }
    }
}

fn check_len(width: usize, height: usize, actual: usize) -> Result<(), PixelError> {
    let expected = width * height;
    if expected != actual {
        return Err(PixelError::Length {
            width,
            height,
            expected,
            actual,
        });
    }
    Ok(())
}
