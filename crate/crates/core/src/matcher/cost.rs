use rayon::prelude::*;

use super::census::{CensusImage, CENSUS_BITS, CENSUS_MARGIN, CENSUS_WINDOW};
use super::MatchError;

/// Size of the fixed disparity search.
pub const NUM_DISPARITIES: usize = 64;
/// Half-width of the square aggregation window.
pub const AGG_RADIUS: usize = 3;
/// Invalid frame width: Census margin plus aggregation radius.
pub const BORDER: usize = CENSUS_MARGIN + AGG_RADIUS;
/// Upper bound of an aggregated cost, 48 bits times 49 window positions.
pub const MAX_AGG_COST: u16 = (CENSUS_BITS as usize * CENSUS_WINDOW * CENSUS_WINDOW) as u16;
/// Stored in place of a cost for candidates that cannot be evaluated.
pub const OUT_OF_RANGE: u16 = u16::MAX;

/// Rows handed to one worker; each band restarts its running column sums.
const BAND_ROWS: usize = 16;

/// Aggregated Hamming costs for every pixel and disparity `0..64`.
///
/// Candidate `d` at `(x, y)` is in range when the pixel lies inside the
/// 6-pixel border and the right-image window `x - d - 3 ..= x - d + 3` stays
/// clear of the Census margin, i.e. `x - d >= 6`. All other entries hold
/// [`OUT_OF_RANGE`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostVolume {
    width: usize,
    height: usize,
    costs: Vec<u16>,
}

impl CostVolume {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Costs of all 64 candidates at `(x, y)`.
    #[inline]
    pub fn candidates(&self, x: usize, y: usize) -> &[u16] {
        let i = (y * self.width + x) * NUM_DISPARITIES;
        &self.costs[i..i + NUM_DISPARITIES]
    }

    #[inline]
    pub fn cost(&self, x: usize, y: usize, d: usize) -> u16 {
        self.costs[(y * self.width + x) * NUM_DISPARITIES + d]
    }

    /// Raw storage, pixel-major with the disparity index fastest.
    pub fn as_slice(&self) -> &[u16] {
        &self.costs
    }

    /// Whether `(x, y)` can carry any in-range candidate.
    #[inline]
    pub fn is_interior(&self, x: usize, y: usize) -> bool {
        x >= BORDER && y >= BORDER && x + BORDER < self.width && y + BORDER < self.height
    }

    #[inline]
    pub fn in_range(&self, x: usize, y: usize, d: usize) -> bool {
        d < NUM_DISPARITIES && self.is_interior(x, y) && x >= d + BORDER
    }

    /// Number of in-range candidates at `(x, y)`; they are exactly `0..n`.
    #[inline]
    pub fn candidate_count(&self, x: usize, y: usize) -> usize {
        if self.is_interior(x, y) {
            (x + 1 - BORDER).min(NUM_DISPARITIES)
        } else {
            0
        }
    }
}

/// Builds the aggregated cost volume from two Census images.
///
/// Raw costs are Hamming distances between `left(x, y)` and `right(x - d, y)`;
/// the aggregated cost sums them over the 7x7 window centered at `(x, y)`.
/// Column sums are maintained incrementally down each band of rows and the
/// horizontal window slides along each row, so every candidate costs two
/// popcounts and a handful of adds.
pub fn build_cost_volume(
    left: &CensusImage,
    right: &CensusImage,
) -> Result<CostVolume, MatchError> {
    let (w, h) = (left.width(), left.height());
    if (w, h) != (right.width(), right.height()) {
        return Err(MatchError::DimensionMismatch {
            left: (w, h),
            right: (right.width(), right.height()),
        });
    }
    let row_len = w * NUM_DISPARITIES;
    let mut costs = vec![OUT_OF_RANGE; w * h * NUM_DISPARITIES];
    if w <= 2 * BORDER || h <= 2 * BORDER {
        return Ok(CostVolume {
            width: w,
            height: h,
            costs,
        });
    }

    let interior = &mut costs[BORDER * row_len..(h - BORDER) * row_len];
    interior
        .par_chunks_mut(row_len * BAND_ROWS)
        .enumerate()
        .for_each(|(band, out)| {
            let y0 = BORDER + band * BAND_ROWS;
            let rows = out.len() / row_len;
            let mut colsum = vec![0u16; row_len];
            let mut raw = vec![0u8; row_len];
            for ry in y0 - AGG_RADIUS..=y0 + AGG_RADIUS {
                raw_row(left.row(ry), right.row(ry), &mut raw);
                add_row(&mut colsum, &raw);
            }
            for r in 0..rows {
                let y = y0 + r;
                if r > 0 {
                    raw_row(
                        left.row(y + AGG_RADIUS),
                        right.row(y + AGG_RADIUS),
                        &mut raw,
                    );
                    add_row(&mut colsum, &raw);
                    raw_row(
                        left.row(y - AGG_RADIUS - 1),
                        right.row(y - AGG_RADIUS - 1),
                        &mut raw,
                    );
                    sub_row(&mut colsum, &raw);
                }
                aggregate_row(&colsum, &mut out[r * row_len..(r + 1) * row_len], w);
            }
        });

    Ok(CostVolume {
        width: w,
        height: h,
        costs,
    })
}

/// Hamming distances for one scanline. Entries for columns or disparities
/// without a defined Census pair are zero; they never reach an in-range sum.
fn raw_row(left: &[u64], right: &[u64], out: &mut [u8]) {
    let w = left.len();
    out.fill(0);
    for x in CENSUS_MARGIN..w - CENSUS_MARGIN {
        let l = left[x];
        let dmax = (x - CENSUS_MARGIN).min(NUM_DISPARITIES - 1);
        let cell = &mut out[x * NUM_DISPARITIES..(x + 1) * NUM_DISPARITIES];
        for (d, c) in cell.iter_mut().enumerate().take(dmax + 1) {
            *c = (l ^ right[x - d]).count_ones() as u8;
        }
    }
}

#[inline]
fn add_row(acc: &mut [u16], raw: &[u8]) {
    for (a, &r) in acc.iter_mut().zip(raw) {
        *a += u16::from(r);
    }
}

#[inline]
fn sub_row(acc: &mut [u16], raw: &[u8]) {
    for (a, &r) in acc.iter_mut().zip(raw) {
        *a -= u16::from(r);
    }
}

/// Slides the 7-wide horizontal window over the column sums of one row and
/// writes aggregated costs, marking out-of-range candidates.
fn aggregate_row(colsum: &[u16], out: &mut [u16], w: usize) {
    const D: usize = NUM_DISPARITIES;
    let mut acc = [0u16; D];
    for xs in BORDER - AGG_RADIUS..=BORDER + AGG_RADIUS {
        for (a, &c) in acc.iter_mut().zip(&colsum[xs * D..(xs + 1) * D]) {
            *a += c;
        }
    }
    for x in BORDER..w - BORDER {
        if x > BORDER {
            let add = &colsum[(x + AGG_RADIUS) * D..(x + AGG_RADIUS + 1) * D];
            let sub = &colsum[(x - AGG_RADIUS - 1) * D..(x - AGG_RADIUS) * D];
            for ((a, &p), &m) in acc.iter_mut().zip(add).zip(sub) {
                *a = *a + p - m;
            }
        }
        let cell = &mut out[x * D..(x + 1) * D];
        let valid = (x + 1 - BORDER).min(D);
        cell[..valid].copy_from_slice(&acc[..valid]);
        // cell[valid..] keeps OUT_OF_RANGE from initialization.
    }
}
