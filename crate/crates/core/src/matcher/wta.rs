use rayon::prelude::*;

use super::cost::{CostVolume, NUM_DISPARITIES, OUT_OF_RANGE};
use crate::pixel::{DisparityMap, INVALID_DISPARITY, MIN_VALID_FIXED, SUBPIXEL_SCALE};

/// Winner-take-all statistics for one pixel; inputs to the interest operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchStats {
    /// Integer disparity with the lowest aggregated cost.
    pub best_d: u8,
    /// Cost at `best_d`.
    pub c1: u16,
    /// Lowest cost among candidates at least two disparities from `best_d`,
    /// or [`OUT_OF_RANGE`] when there is none.
    pub c2: u16,
    /// Cost at `best_d - 1`, or [`OUT_OF_RANGE`].
    pub c_prev: u16,
    /// Cost at `best_d + 1`, or [`OUT_OF_RANGE`].
    pub c_next: u16,
    /// Parabola offset in `[-0.5, 0.5]`.
    pub subpixel_offset: f64,
}

impl MatchStats {
    /// Refined disparity in 1/32-pixel units, never the sentinel.
    pub fn fixed_disparity(&self) -> u16 {
        let v = ((f64::from(self.best_d) + self.subpixel_offset) * f64::from(SUBPIXEL_SCALE))
            .round() as u16;
        v.max(MIN_VALID_FIXED)
    }

    /// Smaller of the two adjacent costs, ignoring absent neighbors.
    pub fn neighbor_min(&self) -> Option<u16> {
        match (self.c_prev, self.c_next) {
            (OUT_OF_RANGE, OUT_OF_RANGE) => None,
            (OUT_OF_RANGE, n) | (n, OUT_OF_RANGE) => Some(n),
            (p, n) => Some(p.min(n)),
        }
    }
}

/// Per-pixel winner-take-all output.
#[derive(Debug, Clone, PartialEq)]
pub struct WtaResult {
    width: usize,
    height: usize,
    stats: Vec<Option<MatchStats>>,
    disparity: DisparityMap,
}

impl WtaResult {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Statistics at `(x, y)`, `None` where no candidate was in range.
    #[inline]
    pub fn stats(&self, x: usize, y: usize) -> Option<&MatchStats> {
        self.stats[y * self.width + x].as_ref()
    }

    pub fn all_stats(&self) -> &[Option<MatchStats>] {
        &self.stats
    }

    /// Unfiltered refined disparities.
    pub fn disparity(&self) -> &DisparityMap {
        &self.disparity
    }
}

/// Vertex offset of the parabola through `(−1, c_prev)`, `(0, c1)`,
/// `(1, c_next)`, clamped to half a pixel. Degenerate fits give 0.
pub fn parabola_offset(c_prev: u16, c1: u16, c_next: u16) -> f64 {
    if c_prev == OUT_OF_RANGE || c_next == OUT_OF_RANGE {
        return 0.0;
    }
    let (p, c, n) = (f64::from(c_prev), f64::from(c1), f64::from(c_next));
    let denom = p - 2.0 * c + n;
    if denom <= 0.0 {
        return 0.0;
    }
    ((p - n) / (2.0 * denom)).clamp(-0.5, 0.5)
}

/// Statistics for one pixel's candidate list (in-range entries form a prefix).
pub fn pixel_stats(costs: &[u16], count: usize) -> Option<MatchStats> {
    if count == 0 {
        return None;
    }
    let costs = &costs[..count];
    let mut best = 0usize;
    for (d, &c) in costs.iter().enumerate().skip(1) {
        if c < costs[best] {
            best = d;
        }
    }
    let c1 = costs[best];
    let c2 = costs
        .iter()
        .enumerate()
        .filter(|(d, _)| d.abs_diff(best) >= 2)
        .map(|(_, &c)| c)
        .min()
        .unwrap_or(OUT_OF_RANGE);
    let c_prev = if best > 0 {
        costs[best - 1]
    } else {
        OUT_OF_RANGE
    };
    let c_next = costs.get(best + 1).copied().unwrap_or(OUT_OF_RANGE);
    Some(MatchStats {
        best_d: best as u8,
        c1,
        c2,
        c_prev,
        c_next,
        subpixel_offset: parabola_offset(c_prev, c1, c_next),
    })
}

/// Winner-take-all with parabolic subpixel refinement. Ties go to the
/// smallest disparity.
pub fn wta_subpixel(vol: &CostVolume) -> WtaResult {
    let (w, h) = (vol.width(), vol.height());
    let mut stats = vec![None; w * h];
    stats.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, s) in row.iter_mut().enumerate() {
            *s = pixel_stats(vol.candidates(x, y), vol.candidate_count(x, y));
        }
    });
    let values = stats
        .iter()
        .map(|s| s.map_or(INVALID_DISPARITY, |s| s.fixed_disparity()))
        .collect();
    let disparity = DisparityMap::new(w, h, values).expect("dimensions match by construction");
    WtaResult {
        width: w,
        height: h,
        stats,
        disparity,
    }
}

/// Integer disparity of the right view, read from the same volume: for each
/// right column `xr`, the `d` minimizing `cost(xr + d, y, d)`.
///
/// Values are stored as `d * 32` with `d = 0` clamped to `1`, so
/// [`DisparityMap::integer_at`] recovers the integer disparity.
pub fn right_disparity(vol: &CostVolume) -> DisparityMap {
    let (w, h) = (vol.width(), vol.height());
    let mut values = vec![INVALID_DISPARITY; w * h];
    values.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (xr, out) in row.iter_mut().enumerate() {
            let mut best: Option<(usize, u16)> = None;
            for d in 0..NUM_DISPARITIES {
                let xl = xr + d;
                if xl >= w || !vol.in_range(xl, y, d) {
                    continue;
                }
                let c = vol.cost(xl, y, d);
                if best.is_none_or(|(_, bc)| c < bc) {
                    best = Some((d, c));
                }
            }
            if let Some((d, _)) = best {
                *out = (d as u16 * SUBPIXEL_SCALE).max(MIN_VALID_FIXED);
            }
        }
    });
    DisparityMap::new(w, h, values).expect("dimensions match by construction")
}
