//! Interest operators: per-pixel confidence tests that invalidate weak
//! matches, and the Off/Low/Medium/High presets that bundle their thresholds.
//!
//! A pixel is kept only if it passes every enabled test:
//!
//! | operator     | passes when                                              |
//! |--------------|----------------------------------------------------------|
//! | min score    | `c1 >= min_score`                                        |
//! | max score    | `c1 <= max_score`                                        |
//! | left-right   | `|32 (best_d - right_d(x - best_d))| <= lr_max`          |
//! | neighbor     | `min(c_prev, c_next) - c1 >= neighbor_min`               |
//! | second peak  | `c2 - c1 >= second_peak_min`                             |
//! | texture      | at least N of the 7x7 left-image window differ from the center by more than δ |
//! | median       | `c1 <= running percentile of c1 + median_offset`         |
//!
//! Scores are aggregated Census costs, so lower is better. Absent neighbor
//! or second-peak costs fail their test. The percentile tracker runs in
//! raster order over every pixel with an in-range match, independent of the
//! other operators, so tightening any single threshold only ever shrinks the
//! valid set.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::{MatchStats, WtaResult, OUT_OF_RANGE};
use crate::pixel::{DisparityMap, GrayImage, ValidityMask, SUBPIXEL_SCALE};

/// Half-width of the texture operator's window.
pub const TEXTURE_RADIUS: usize = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterestError {
    #[error("{what} is {got:?} but the match statistics are {expected:?}")]
    DimensionMismatch {
        what: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("unknown preset {0:?}; expected off, low, medium or high")]
    UnknownPreset(String),
    #[error("invalid thresholds: {0}")]
    Invalid(String),
}

/// Which operators are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnabledOperators {
    pub min_score: bool,
    pub max_score: bool,
    pub left_right: bool,
    pub neighbor: bool,
    pub second_peak: bool,
    pub texture: bool,
    pub median: bool,
}

impl EnabledOperators {
    pub const NONE: Self = Self {
        min_score: false,
        max_score: false,
        left_right: false,
        neighbor: false,
        second_peak: false,
        texture: false,
        median: false,
    };
}

/// Threshold record for all seven operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Lower bound on the winning cost.
    pub min_score: u16,
    /// Upper bound on the winning cost.
    pub max_score: u16,
    /// Left-right disagreement allowed, in 1/32 pixels.
    pub lr_max: u16,
    /// Required margin between the winner and its adjacent candidates.
    pub neighbor_min: u16,
    /// Required margin between the winner and the best non-adjacent candidate.
    pub second_peak_min: u16,
    /// Pixels (N) of the 7x7 window that must differ from the center.
    pub texture_count_min: u8,
    /// Intensity difference (δ) counted by the texture operator.
    pub texture_diff: u16,
    /// Slack added to the running percentile of the winning cost.
    pub median_offset: f64,
    /// Percentile tracked by the median operator, `0 < p < 1`.
    pub median_percentile: f64,
    /// Step size of the percentile tracker.
    pub median_step: f64,
    pub enabled: EnabledOperators,
}

impl Thresholds {
    /// Every operator disabled.
    pub fn off() -> Self {
        Self {
            min_score: 0,
            max_score: OUT_OF_RANGE,
            lr_max: OUT_OF_RANGE,
            neighbor_min: 0,
            second_peak_min: 0,
            texture_count_min: 0,
            texture_diff: 0,
            median_offset: f64::from(OUT_OF_RANGE),
            median_percentile: 0.5,
            median_step: 1.0,
            enabled: EnabledOperators::NONE,
        }
    }

    pub fn validate(&self) -> Result<(), InterestError> {
        if self.min_score > self.max_score {
            return Err(InterestError::Invalid(format!(
                "min_score {} exceeds max_score {}",
                self.min_score, self.max_score
            )));
        }
        if !(self.median_percentile > 0.0 && self.median_percentile < 1.0) {
            return Err(InterestError::Invalid(format!(
                "median_percentile {} must lie in (0, 1)",
                self.median_percentile
            )));
        }
        if !(self.median_step > 0.0) || !self.median_step.is_finite() {
            return Err(InterestError::Invalid(format!(
                "median_step {} must be positive",
                self.median_step
            )));
        }
        if !(self.median_offset >= 0.0) {
            return Err(InterestError::Invalid(format!(
                "median_offset {} must be non-negative",
                self.median_offset
            )));
        }
        if usize::from(self.texture_count_min) > (2 * TEXTURE_RADIUS + 1).pow(2) - 1 {
            return Err(InterestError::Invalid(format!(
                "texture_count_min {} exceeds the 48 window neighbors",
                self.texture_count_min
            )));
        }
        Ok(())
    }
}

/// Named threshold bundles, from pass-through to most aggressive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetName {
    Off,
    Low,
    Medium,
    High,
}

impl PresetName {
    pub const ALL: [PresetName; 4] = [Self::Off, Self::Low, Self::Medium, Self::High];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Off => "off",
            Self::Low => "low",
            Self::Medium => "medium",
            Self::High => "high",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = InterestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(Self::Off),
            "low" => Ok(Self::Low),
            "medium" => Ok(Self::Medium),
            "high" => Ok(Self::High),
            _ => Err(InterestError::UnknownPreset(s.to_owned())),
        }
    }
}

/// Operators switched on by every preset other than Off. The min-score test
/// stays off: a perfect match has cost 0 and must survive.
const PRESET_OPERATORS: EnabledOperators = EnabledOperators {
    min_score: false,
    max_score: true,
    left_right: true,
    neighbor: true,
    second_peak: true,
    texture: true,
    median: true,
};

/// Shipped threshold set for a preset.
///
/// The numbers are defined by this crate, tuned on the synthetic wall and
/// below-minimum-range scenes. Every enabled threshold is strictly more
/// aggressive from Low to Medium to High.
pub fn preset_thresholds(name: PresetName) -> Thresholds {
    let base = Thresholds {
        enabled: PRESET_OPERATORS,
        ..Thresholds::off()
    };
    match name {
        PresetName::Off => Thresholds::off(),
        PresetName::Low => Thresholds {
            max_score: 700,
            lr_max: 64,
            neighbor_min: 0,
            second_peak_min: 20,
            texture_count_min: 2,
            texture_diff: 2,
            median_offset: 600.0,
            ..base
        },
        PresetName::Medium => Thresholds {
            max_score: 600,
            lr_max: 32,
            neighbor_min: 1,
            second_peak_min: 60,
            texture_count_min: 4,
            texture_diff: 3,
            median_offset: 400.0,
            ..base
        },
        PresetName::High => Thresholds {
            max_score: 500,
            lr_max: 16,
            neighbor_min: 3,
            second_peak_min: 120,
            texture_count_min: 8,
            texture_diff: 4,
            median_offset: 250.0,
            ..base
        },
    }
}

/// Stochastic percentile estimate, one Robbins-Monro step:
/// `m + step * (1[c > m] - (1 - p))`. Ties count as not greater.
#[inline]
pub fn median_tracker_update(estimate: f64, observation: f64, percentile: f64, step: f64) -> f64 {
    let above = if observation > estimate { 1.0 } else { 0.0 };
    estimate + step * (above - (1.0 - percentile))
}

/// Running percentile of a cost stream, seeded with its first observation.
#[derive(Debug, Clone)]
pub struct PercentileTracker {
    estimate: Option<f64>,
    percentile: f64,
    step: f64,
}

impl PercentileTracker {
    pub fn new(percentile: f64, step: f64) -> Self {
        Self {
            estimate: None,
            percentile,
            step,
        }
    }

    pub fn estimate(&self) -> Option<f64> {
        self.estimate
    }

    /// Feeds one observation and returns the estimate held *before* it.
    pub fn observe(&mut self, c: f64) -> f64 {
        let prior = self.estimate.unwrap_or(c);
        self.estimate = Some(median_tracker_update(prior, c, self.percentile, self.step));
        prior
    }
}

/// Applies every enabled interest operator and returns the pixels that
/// survive. Pixels without an in-range match are always invalid.
pub fn evaluate_validity(
    wta: &WtaResult,
    left: &GrayImage,
    right_map: &DisparityMap,
    th: &Thresholds,
) -> Result<ValidityMask, InterestError> {
    th.validate()?;
    let (w, h) = (wta.width(), wta.height());
    check_dims("left image", (w, h), (left.width(), left.height()))?;
    check_dims(
        "right disparity",
        (w, h),
        (right_map.width(), right_map.height()),
    )?;

    let mut bits = vec![false; w * h];
    bits.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, keep) in row.iter_mut().enumerate() {
            *keep = match wta.stats(x, y) {
                Some(s) => local_tests(s, x, y, left, right_map, th),
                None => false,
            };
        }
    });

    if th.enabled.median {
        let mut tracker = PercentileTracker::new(th.median_percentile, th.median_step);
        for (s, keep) in wta.all_stats().iter().zip(bits.iter_mut()) {
            if let Some(s) = s {
                let c = f64::from(s.c1);
                let estimate = tracker.observe(c);
                if c > estimate + th.median_offset {
                    *keep = false;
                }
            }
        }
    }

    Ok(ValidityMask::new(w, h, bits).expect("dimensions match by construction"))
}

fn local_tests(
    s: &MatchStats,
    x: usize,
    y: usize,
    left: &GrayImage,
    right_map: &DisparityMap,
    th: &Thresholds,
) -> bool {
    let en = &th.enabled;
    if en.min_score && s.c1 < th.min_score {
        return false;
    }
    if en.max_score && s.c1 > th.max_score {
        return false;
    }
    if en.neighbor {
        match s.neighbor_min() {
            Some(n) if n - s.c1 >= th.neighbor_min => {}
            _ => return false,
        }
    }
    if en.second_peak && (s.c2 == OUT_OF_RANGE || s.c2 - s.c1 < th.second_peak_min) {
        return false;
    }
    if en.left_right {
        let xr = x - usize::from(s.best_d);
        match right_map.integer_at(xr, y) {
            Some(rd) => {
                let diff = (i32::from(s.best_d) - i32::from(rd)).unsigned_abs()
                    * u32::from(SUBPIXEL_SCALE);
                if diff > u32::from(th.lr_max) {
                    return false;
                }
            }
            None => return false,
        }
    }
    if en.texture && texture_count(left, x, y, th.texture_diff) < usize::from(th.texture_count_min)
    {
        return false;
    }
    true
}

/// Window pixels whose intensity differs from the center by more than `diff`.
pub fn texture_count(img: &GrayImage, x: usize, y: usize, diff: u16) -> usize {
    let r = TEXTURE_RADIUS;
    let (x0, x1) = (x.saturating_sub(r), (x + r).min(img.width() - 1));
    let (y0, y1) = (y.saturating_sub(r), (y + r).min(img.height() - 1));
    let center = img.get(x, y);
    (y0..=y1)
        .map(|yy| {
            img.row(yy)[x0..=x1]
                .iter()
                .filter(|&&v| v.abs_diff(center) > diff)
                .count()
        })
        .sum()
}

fn check_dims(
    what: &'static str,
    expected: (usize, usize),
    got: (usize, usize),
) -> Result<(), InterestError> {
    if expected != got {
        return Err(InterestError::DimensionMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}
