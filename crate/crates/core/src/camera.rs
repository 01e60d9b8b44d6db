//! Pinhole camera with the modified Brown-Conrady distortion model, the
//! disparity/depth relation `z = fx * B / d`, deprojection, and the
//! operating range implied by a 64-disparity, 5-bit subpixel search.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::NUM_DISPARITIES;
use crate::pixel::{SUBPIXEL_BITS, SUBPIXEL_SCALE};

/// Fixed-point iterations used by [`undistort_point`].
pub const UNDISTORT_ITERATIONS: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("focal lengths must be positive (fx = {fx}, fy = {fy})")]
    FocalLength { fx: f64, fy: f64 },
    #[error("baseline must be positive, got {0}")]
    Baseline(f64),
    #[error("principal point ({cx}, {cy}) lies outside a {width}x{height} frame")]
    PrincipalPoint {
        cx: f64,
        cy: f64,
        width: usize,
        height: usize,
    },
}

/// Lens distortion family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistortionModel {
    #[default]
    None,
    /// Three even radial terms, two tangential terms evaluated on the
    /// radially corrected coordinates.
    ModifiedBrownConrady,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    #[serde(default)]
    pub k1: f64,
    #[serde(default)]
    pub k2: f64,
    #[serde(default)]
    pub k3: f64,
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
    #[serde(default)]
    pub model: DistortionModel,
}

impl Intrinsics {
    /// Distortion-free intrinsics with the principal point at the frame center.
    pub fn pinhole(fx: f64, fy: f64, width: usize, height: usize) -> Self {
        Self {
            fx,
            fy,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            k1: 0.0,
            k2: 0.0,
            k3: 0.0,
            p1: 0.0,
            p2: 0.0,
            model: DistortionModel::None,
        }
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<(), GeometryError> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(GeometryError::FocalLength {
                fx: self.fx,
                fy: self.fy,
            });
        }
        let inside = |c: f64, n: usize| c > 0.0 && c < n as f64;
        if !inside(self.cx, width) || !inside(self.cy, height) {
            return Err(GeometryError::PrincipalPoint {
                cx: self.cx,
                cy: self.cy,
                width,
                height,
            });
        }
        Ok(())
    }
}

/// Rectified stereo pair described by its left camera and baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StereoRig {
    pub intrinsics: Intrinsics,
    /// Baseline in meters.
    pub baseline: f64,
}

impl StereoRig {
    pub fn new(intrinsics: Intrinsics, baseline: f64) -> Result<Self, GeometryError> {
        if !(baseline > 0.0) {
            return Err(GeometryError::Baseline(baseline));
        }
        if !(intrinsics.fx > 0.0 && intrinsics.fy > 0.0) {
            return Err(GeometryError::FocalLength {
                fx: intrinsics.fx,
                fy: intrinsics.fy,
            });
        }
        Ok(Self {
            intrinsics,
            baseline,
        })
    }

    /// The `fx * B` product in meter-pixels.
    pub fn focal_baseline(&self) -> f64 {
        self.intrinsics.fx * self.baseline
    }

    pub const fn num_disparities(&self) -> usize {
        NUM_DISPARITIES
    }

    pub const fn subpixel_bits(&self) -> u32 {
        SUBPIXEL_BITS
    }
}

/// Depth in meters for a disparity in pixels; `None` when `d <= 0`.
pub fn disparity_to_depth(d: f64, rig: &StereoRig) -> Option<f64> {
    (d > 0.0).then(|| rig.focal_baseline() / d)
}

/// Disparity in pixels for a depth in meters; `None` when `z <= 0`.
pub fn depth_to_disparity(z: f64, rig: &StereoRig) -> Option<f64> {
    (z > 0.0).then(|| rig.focal_baseline() / z)
}

/// Back-projects a rectified pixel at depth `z` to camera coordinates.
pub fn deproject(x: f64, y: f64, z: f64, intr: &Intrinsics) -> [f64; 3] {
    [(x - intr.cx) * z / intr.fx, (y - intr.cy) * z / intr.fy, z]
}

/// Applies the modified Brown-Conrady model to normalized coordinates.
pub fn distort_point(xn: f64, yn: f64, intr: &Intrinsics) -> (f64, f64) {
    if intr.model == DistortionModel::None {
        return (xn, yn);
    }
    let r2 = xn * xn + yn * yn;
    let radial = 1.0 + r2 * (intr.k1 + r2 * (intr.k2 + r2 * intr.k3));
    let (x, y) = (xn * radial, yn * radial);
    let rr2 = x * x + y * y;
    let xy = x * y;
    (
        x + 2.0 * intr.p1 * xy + intr.p2 * (rr2 + 2.0 * x * x),
        y + intr.p1 * (rr2 + 2.0 * y * y) + 2.0 * intr.p2 * xy,
    )
}

/// Inverts [`distort_point`] by fixed-point iteration
/// ([`UNDISTORT_ITERATIONS`] steps).
pub fn undistort_point(xd: f64, yd: f64, intr: &Intrinsics) -> (f64, f64) {
    if intr.model == DistortionModel::None {
        return (xd, yd);
    }
    let (mut x, mut y) = (xd, yd);
    for _ in 0..UNDISTORT_ITERATIONS {
        let (fx, fy) = distort_point(x, y, intr);
        x += xd - fx;
        y += yd - fy;
    }
    (x, y)
}

/// Closest and farthest depths the fixed search can report.
///
/// The nearest depth uses the largest representable disparity
/// `63 + 31/32`; the farthest uses the smallest non-zero one, `1/32`.
pub fn operating_range(rig: &StereoRig) -> (f64, f64) {
    let scale = f64::from(SUBPIXEL_SCALE);
    let d_max = (NUM_DISPARITIES - 1) as f64 + (scale - 1.0) / scale;
    let d_min = 1.0 / scale;
    let fb = rig.focal_baseline();
    (fb / d_max, fb / d_min)
}
