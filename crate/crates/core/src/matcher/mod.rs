//! Census correlation core: 7x7 Census transform, 64-disparity Hamming cost
//! volume with 7x7 box aggregation, winner-take-all with parabolic subpixel
//! refinement, and the right-view disparity used by the left-right check.
//!
//! Everything here is integer arithmetic except the subpixel fit, which is a
//! pure per-pixel function; row-parallel execution is bit-identical to a
//! sequential run.

mod census;
mod cost;
mod wta;

pub use census::{census_transform, CensusImage, CENSUS_BITS, CENSUS_MARGIN, CENSUS_WINDOW};
pub use cost::{
    build_cost_volume, CostVolume, AGG_RADIUS, BORDER, MAX_AGG_COST, NUM_DISPARITIES, OUT_OF_RANGE,
};
pub use wta::{parabola_offset, pixel_stats, right_disparity, wta_subpixel, MatchStats, WtaResult};

use thiserror::Error;

use crate::interest::{evaluate_validity, InterestError, Thresholds};
use crate::pixel::{DisparityMap, GrayImage, ValidityMask};

/// Smallest frame accepted by [`match_images`].
pub const MIN_MATCH_SIZE: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error("image is {width}x{height}; at least {min}x{min} is required")]
    TooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("left image is {}x{} but right image is {}x{}", left.0, left.1, right.0, right.1)]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error(transparent)]
    Interest(#[from] InterestError),
}

/// Every intermediate of one matcher run.
#[derive(Debug, Clone)]
pub struct MatchOutput {
    pub wta: WtaResult,
    pub right: DisparityMap,
    pub mask: ValidityMask,
    pub disparity: DisparityMap,
}

/// Runs the full correlation pipeline and returns the masked disparity map.
///
/// Interest operators only ever remove matches; nothing is interpolated.
pub fn match_images(
    left: &GrayImage,
    right: &GrayImage,
    thresholds: &Thresholds,
) -> Result<DisparityMap, MatchError> {
    Ok(match_images_detailed(left, right, thresholds)?.disparity)
}

/// Like [`match_images`], keeping the winner-take-all statistics, the right
/// view and the validity mask.
pub fn match_images_detailed(
    left: &GrayImage,
    right: &GrayImage,
    thresholds: &Thresholds,
) -> Result<MatchOutput, MatchError> {
    let (w, h) = (left.width(), left.height());
    if (w, h) != (right.width(), right.height()) {
        return Err(MatchError::DimensionMismatch {
            left: (w, h),
            right: (right.width(), right.height()),
        });
    }
    if w < MIN_MATCH_SIZE || h < MIN_MATCH_SIZE {
        return Err(MatchError::TooSmall {
            width: w,
            height: h,
            min: MIN_MATCH_SIZE,
        });
    }
    let (lc, rc) = rayon::join(|| census_transform(left), || census_transform(right));
    let vol = build_cost_volume(&lc?, &rc?)?;
    let wta = wta_subpixel(&vol);
    let right_map = if thresholds.enabled.left_right {
        right_disparity(&vol)
    } else {
        DisparityMap::invalid(w, h)
    };
    let mask = evaluate_validity(&wta, left, &right_map, thresholds)?;
    let disparity = wta
        .disparity()
        .masked(&mask)
        .expect("mask shares the map's dimensions");
    Ok(MatchOutput {
        wta,
        right: right_map,
        mask,
        disparity,
    })
}
