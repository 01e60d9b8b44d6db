use rayon::prelude::*;

use super::MatchError;
use crate::pixel::GrayImage;

/// Side length of the Census window.
pub const CENSUS_WINDOW: usize = 7;
/// Pixels on each side of the frame where no Census code exists.
pub const CENSUS_MARGIN: usize = CENSUS_WINDOW / 2;
/// Bits per code: every window position except the center.
pub const CENSUS_BITS: u32 = (CENSUS_WINDOW * CENSUS_WINDOW - 1) as u32;

/// Per-pixel 48-bit Census descriptors packed into the low bits of a `u64`.
///
/// Bit `k` corresponds to the `k`-th non-center position of the 7x7 window in
/// row-major order (top-left is bit 0) and is set when that neighbor is
/// strictly darker than the center. Codes inside the 3-pixel margin are zero
/// and reported as undefined by [`CensusImage::is_defined`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusImage {
    width: usize,
    height: usize,
    codes: Vec<u64>,
}

impl CensusImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    #[inline]
    pub fn code(&self, x: usize, y: usize) -> u64 {
        self.codes[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[u64] {
        &self.codes[y * self.width..(y + 1) * self.width]
    }

    pub fn is_defined(&self, x: usize, y: usize) -> bool {
        x >= CENSUS_MARGIN
            && y >= CENSUS_MARGIN
            && x + CENSUS_MARGIN < self.width
            && y + CENSUS_MARGIN < self.height
    }
}

/// Computes the 7x7 Census transform of `img`.
pub fn census_transform(img: &GrayImage) -> Result<CensusImage, MatchError> {
    let (w, h) = (img.width(), img.height());
    if w < CENSUS_WINDOW || h < CENSUS_WINDOW {
        return Err(MatchError::TooSmall {
            width: w,
            height: h,
            min: CENSUS_WINDOW,
        });
    }
    let mut codes = vec![0u64; w * h];
    let m = CENSUS_MARGIN;
    codes
        .par_chunks_mut(w)
        .enumerate()
        .skip(m)
        .take(h - 2 * m)
        .for_each(|(y, out)| {
            let rows: Vec<&[u16]> = (y - m..=y + m).map(|ry| img.row(ry)).collect();
            let center_row = rows[m];
            for x in m..w - m {
                let center = center_row[x];
                let mut code = 0u64;
                let mut bit = 0u32;
                for (dy, row) in rows.iter().enumerate() {
                    for dx in 0..CENSUS_WINDOW {
                        // The center is skipped without consuming a bit.
                        if dy == m && dx == m {
                            continue;
                        }
                        if row[x + dx - m] < center {
                            code |= 1 << bit;
                        }
                        bit += 1;
                    }
                }
                out[x] = code;
            }
        });
    Ok(CensusImage {
        width: w,
        height: h,
        codes,
    })
}
