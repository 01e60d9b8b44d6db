//! Synthetic rectified stereo pairs of textured planes with exact ground
//! truth.
//!
//! The texture is a continuous random-dot field
//! `T(u, v) = background + contrast * (1 - Π_i (1 - g_i(u, v)))` where each
//! `g_i` is an isotropic Gaussian of standard deviation `radius`. Both views
//! sample the same field analytically, `left(x, y) = T(x, y)` and
//! `right(x, y) = T(x + D(x, y), y)`, so fractional disparities need no
//! resampling and the ground truth carries no interpolation error.
//!
//! Plane disparities are specified on the left image grid. For a ramp
//! `d(x, y) = a + b x + c y`, the right view's disparity at column `x` is
//! `(a + b x + c y) / (1 - b)`, the unique value that maps it back onto a
//! left pixel whose ground truth is exactly `d`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::{Intrinsics, StereoRig};
use crate::matcher::NUM_DISPARITIES;
use crate::pixel::{BitDepth, FloatDisparityMap, GrayImage};
use crate::rng::{derive_seed, CounterRng};

/// Dot contributions beyond this many standard deviations are dropped.
const CUTOFF_SIGMAS: f64 = 5.0;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid scene: {0}")]
    Scene(String),
}

/// Plane seen by the rig.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PlaneGeometry {
    /// Wall perpendicular to the optical axis at `z0` meters.
    FrontoParallel { z0: f64 },
    /// Left-image disparity `a + b x + c y` in pixels.
    Ramp { a: f64, b: f64, c: f64 },
}

/// Random-dot texture parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DotTexture {
    /// Dots per 100 px².
    pub density: f64,
    /// Gaussian standard deviation of a dot, pixels.
    pub radius: f64,
    /// Intensity span between background and a saturated dot, DN.
    pub contrast: f64,
    /// Background intensity, DN.
    pub background: f64,
}

impl Default for DotTexture {
    fn default() -> Self {
        Self {
            density: 8.0,
            radius: 1.2,
            contrast: 120.0,
            background: 60.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneScene {
    pub rig: StereoRig,
    pub width: usize,
    pub height: usize,
    pub plane: PlaneGeometry,
    pub texture: DotTexture,
    pub bit_depth: BitDepth,
    pub seed: u64,
}

/// Rendered pair with its left-view ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedPair {
    pub left: GrayImage,
    pub right: GrayImage,
    pub gt: FloatDisparityMap,
    /// Some ground-truth disparity is at or beyond the 64-pixel search, i.e.
    /// part of the plane is closer than the minimum range.
    pub exceeds_search_range: bool,
}

impl PlaneScene {
    /// 8-bit scene with the default texture and seed 0.
    pub fn new(rig: StereoRig, width: usize, height: usize, plane: PlaneGeometry) -> Self {
        Self {
            rig,
            width,
            height,
            plane,
            texture: DotTexture::default(),
            bit_depth: BitDepth::Eight,
            seed: 0,
        }
    }

    /// Constant-disparity wall seen by a 477 px, 70 mm rig.
    pub fn constant_disparity(width: usize, height: usize, d: f64) -> Self {
        let intr = Intrinsics::pinhole(477.0, 477.0, width, height);
        let rig = StereoRig::new(intr, 0.07).expect("positive focal length and baseline");
        Self::new(
            rig,
            width,
            height,
            PlaneGeometry::Ramp {
                a: d,
                b: 0.0,
                c: 0.0,
            },
        )
    }

    /// Left-image disparity at `(x, y)`.
    pub fn disparity_at(&self, x: f64, y: f64) -> f64 {
        match self.plane {
            PlaneGeometry::FrontoParallel { z0 } => self.rig.focal_baseline() / z0,
            PlaneGeometry::Ramp { a, b, c } => a + b * x + c * y,
        }
    }

    /// Right-image disparity at `(x, y)`: left column minus right column.
    pub fn right_disparity_at(&self, x: f64, y: f64) -> f64 {
        match self.plane {
            PlaneGeometry::FrontoParallel { z0 } => self.rig.focal_baseline() / z0,
            PlaneGeometry::Ramp { a, b, c } => (a + b * x + c * y) / (1.0 - b),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let err = |m: String| Err(SynthError::Scene(m));
        if self.width == 0 || self.height == 0 {
            return err(format!("empty resolution {}x{}", self.width, self.height));
        }
        match self.plane {
            PlaneGeometry::FrontoParallel { z0 } if !(z0 > 0.0 && z0.is_finite()) => {
                return err(format!("z0 must be positive, got {z0}"));
            }
            PlaneGeometry::Ramp { b, .. } if !(b < 1.0) => {
                return err(format!("ramp slope b must be below 1, got {b}"));
            }
            _ => {}
        }
        for d in self.corner_disparities() {
            if !(d.is_finite() && d >= 0.0) {
                return err(format!("scene disparity {d} is negative or not finite"));
            }
        }
        let t = &self.texture;
        if !(t.density >= 0.0 && t.radius > 0.0 && t.contrast >= 0.0 && t.background >= 0.0) {
            return err(format!("invalid texture {t:?}"));
        }
        Ok(())
    }

    fn corner_disparities(&self) -> [f64; 8] {
        let (xm, ym) = ((self.width - 1) as f64, (self.height - 1) as f64);
        let mut out = [0.0; 8];
        for (i, (x, y)) in [(0.0, 0.0), (xm, 0.0), (0.0, ym), (xm, ym)]
            .into_iter()
            .enumerate()
        {
            out[i] = self.disparity_at(x, y);
            out[i + 4] = self.right_disparity_at(x, y);
        }
        out
    }
}

/// Continuous random-dot field with a uniform grid index over dot centers.
struct DotField {
    u0: f64,
    v0: f64,
    cell: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<(f64, f64)>>,
    inv_two_sigma2: f64,
    cutoff2: f64,
    background: f64,
    contrast: f64,
}

impl DotField {
    fn new(texture: &DotTexture, u_range: (f64, f64), v_range: (f64, f64), seed: u64) -> Self {
        let cutoff = CUTOFF_SIGMAS * texture.radius;
        let (u0, v0) = (u_range.0 - cutoff, v_range.0 - cutoff);
        let (u1, v1) = (u_range.1 + cutoff, v_range.1 + cutoff);
        let cell = cutoff.max(1.0);
        let cols = ((u1 - u0) / cell).ceil() as usize + 1;
        let rows = ((v1 - v0) / cell).ceil() as usize + 1;
        let mut cells = vec![Vec::new(); cols * rows];
        let count = (texture.density / 100.0 * (u1 - u0) * (v1 - v0)).round() as usize;
        let mut rng = CounterRng::new(seed);
        for _ in 0..count {
            let u = rng.random_range(u0..u1);
            let v = rng.random_range(v0..v1);
            let (cx, cy) = (((u - u0) / cell) as usize, ((v - v0) / cell) as usize);
            cells[cy * cols + cx].push((u, v));
        }
        Self {
            u0,
            v0,
            cell,
            cols,
            rows,
            cells,
            inv_two_sigma2: 1.0 / (2.0 * texture.radius * texture.radius),
            cutoff2: cutoff * cutoff,
            background: texture.background,
            contrast: texture.contrast,
        }
    }

    fn sample(&self, u: f64, v: f64) -> f64 {
        let cx = ((u - self.u0) / self.cell).floor() as isize;
        let cy = ((v - self.v0) / self.cell).floor() as isize;
        let mut uncovered = 1.0;
        for gy in cy - 1..=cy + 1 {
            if gy < 0 || gy as usize >= self.rows {
                continue;
            }
            for gx in cx - 1..=cx + 1 {
                if gx < 0 || gx as usize >= self.cols {
                    continue;
                }
                for &(du, dv) in &self.cells[gy as usize * self.cols + gx as usize] {
                    let r2 = (u - du) * (u - du) + (v - dv) * (v - dv);
                    if r2 < self.cutoff2 {
                        uncovered *= 1.0 - (-r2 * self.inv_two_sigma2).exp();
                    }
                }
            }
        }
        self.background + self.contrast * (1.0 - uncovered)
    }
}

/// Renders the left/right pair and exact left-view ground truth.
pub fn render_plane_pair(scene: &PlaneScene) -> Result<RenderedPair, SynthError> {
    scene.validate()?;
    let (w, h) = (scene.width, scene.height);
    let corners = scene.corner_disparities();
    let d_max = corners.iter().copied().fold(0.0, f64::max);
    let field = DotField::new(
        &scene.texture,
        (0.0, (w - 1) as f64 + d_max),
        (0.0, (h - 1) as f64),
        derive_seed(scene.seed, 0),
    );
    let max = f64::from(scene.bit_depth.max_value());
    let quantize = |t: f64| t.round().clamp(0.0, max) as u16;

    let render = |right: bool| -> Vec<u16> {
        let mut out = vec![0u16; w * h];
        out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            let yf = y as f64;
            for (x, o) in row.iter_mut().enumerate() {
                let xf = x as f64;
                let u = if right {
                    xf + scene.right_disparity_at(xf, yf)
                } else {
                    xf
                };
                *o = quantize(field.sample(u, yf));
            }
        });
        out
    };
    let (l, r) = rayon::join(|| render(false), || render(true));
    let left = GrayImage::new(w, h, scene.bit_depth, l).expect("quantized to bit depth");
    let right = GrayImage::new(w, h, scene.bit_depth, r).expect("quantized to bit depth");
    let gt = FloatDisparityMap::from_fn(w, h, |x, y| scene.disparity_at(x as f64, y as f64));
    let exceeds_search_range = corners[..4]
        .iter()
        .any(|&d| d >= (NUM_DISPARITIES - 1) as f64 + 0.5);
    Ok(RenderedPair {
        left,
        right,
        gt,
        exceeds_search_range,
    })
}
