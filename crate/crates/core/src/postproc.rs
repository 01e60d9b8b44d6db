//! Optional host-side cleanup of matcher output: speckle removal, median
//! filtering and disparity-space quantization.
//!
//! None of these create a valid pixel where the input had none.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pixel::{DisparityMap, INVALID_DISPARITY, SUBPIXEL_SCALE};

/// Default quantization step in 1/32 px (0.3125 px, four times the nominal
/// 0.08 px disparity noise snapped to the fixed-point grid).
pub const DEFAULT_QUANT_STEP_FIXED: u16 = 10;

#[derive(Debug, Error, PartialEq)]
pub enum PostprocError {
    #[error("invalid speckle parameters: {0}")]
    Speckle(String),
    #[error("median window must be odd and positive, got {0}")]
    Window(usize),
    #[error("quantization step {0} px must lie in (0, 1] and be a multiple of 1/32")]
    QuantStep(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeckleParams {
    /// Components with fewer pixels than this are removed.
    pub max_region_size: usize,
    /// Largest disparity step, in pixels, between 4-neighbors of one component.
    pub similarity_tol: f64,
}

impl Default for SpeckleParams {
    fn default() -> Self {
        Self {
            max_region_size: 100,
            similarity_tol: 1.0,
        }
    }
}

impl SpeckleParams {
    pub fn validate(&self) -> Result<(), PostprocError> {
        if self.max_region_size == 0 {
            return Err(PostprocError::Speckle("max_region_size must be > 0".into()));
        }
        if !(self.similarity_tol > 0.0 && self.similarity_tol.is_finite()) {
            return Err(PostprocError::Speckle(format!(
                "similarity_tol must be a positive number, got {}",
                self.similarity_tol
            )));
        }
        Ok(())
    }
}

/// Invalidates small 4-connected components of similar disparity.
pub fn speckle_filter(d: &DisparityMap, p: &SpeckleParams) -> Result<DisparityMap, PostprocError> {
    p.validate()?;
    let (w, h) = (d.width(), d.height());
    let vals = d.values();
    let tol = p.similarity_tol * f64::from(SUBPIXEL_SCALE);
    let similar = |a: u16, b: u16| f64::from(a.abs_diff(b)) <= tol;

    let mut out = d.clone();
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::new();
    let mut component = Vec::new();
    for start in 0..w * h {
        if seen[start] || vals[start] == INVALID_DISPARITY {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        component.clear();
        while let Some(i) = queue.pop_front() {
            component.push(i);
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if !seen[j] && vals[j] != INVALID_DISPARITY && similar(vals[i], vals[j]) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        if component.len() < p.max_region_size {
            for &i in &component {
                out.values_mut()[i] = INVALID_DISPARITY;
            }
        }
    }
    Ok(out)
}

/// `k x k` median over valid pixels (lower median for even counts). Invalid
/// pixels stay invalid and never contribute.
pub fn median_filter(d: &DisparityMap, k: usize) -> Result<DisparityMap, PostprocError> {
    if k.is_multiple_of(2) {
        return Err(PostprocError::Window(k));
    }
    let (w, h) = (d.width(), d.height());
    let r = k / 2;
    let vals = d.values();
    let mut out = vec![INVALID_DISPARITY; w * h];
    out.par_chunks_mut(w.max(1))
        .enumerate()
        .for_each(|(y, row)| {
            let mut buf = Vec::with_capacity(k * k);
            for (x, o) in row.iter_mut().enumerate() {
                if vals[y * w + x] == INVALID_DISPARITY {
                    continue;
                }
                buf.clear();
                for yy in y.saturating_sub(r)..(y + r + 1).min(h) {
                    for xx in x.saturating_sub(r)..(x + r + 1).min(w) {
                        let v = vals[yy * w + xx];
                        if v != INVALID_DISPARITY {
                            buf.push(v);
                        }
                    }
                }
                let mid = (buf.len() - 1) / 2;
                *o = *buf.select_nth_unstable(mid).1;
            }
        });
    Ok(DisparityMap::new(w, h, out).expect("same dimensions"))
}

/// Converts a step in pixels to 1/32-px units.
pub fn quant_step_fixed(eps_q: f64) -> Result<u16, PostprocError> {
    let scaled = eps_q * f64::from(SUBPIXEL_SCALE);
    let n = scaled.round();
    if !(eps_q > 0.0 && eps_q <= 1.0) || (scaled - n).abs() > 1e-9 {
        return Err(PostprocError::QuantStep(eps_q));
    }
    Ok(n as u16)
}

/// Rounds every valid value to the nearest multiple of `eps_q` (grid anchored
/// at zero, halves round up). Values that would round to zero become 1, the
/// smallest valid code.
pub fn quantize_disparity(d: &DisparityMap, eps_q: f64) -> Result<DisparityMap, PostprocError> {
    let n = u32::from(quant_step_fixed(eps_q)?);
    let mut out = d.clone();
    for v in out.values_mut() {
        if *v != INVALID_DISPARITY {
            let q = (2 * u32::from(*v) + n) / (2 * n) * n;
            *v = q.clamp(1, u32::from(u16::MAX)) as u16;
        }
    }
    Ok(out)
}
