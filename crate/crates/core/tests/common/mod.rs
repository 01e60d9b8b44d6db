//! Shared helpers for the integration tests: a brute-force matcher and
//! scene builders.
#![allow(dead_code)]

use census_stereo::camera::{Intrinsics, StereoRig};
use census_stereo::noise::{add_sensor_noise, NoiseParams};
use census_stereo::pixel::{BitDepth, GrayImage};
use census_stereo::rng::{derive_seed, CounterRng};
use census_stereo::synth::{render_plane_pair, PlaneGeometry, PlaneScene, RenderedPair};
use rand::Rng;

pub const D: usize = 64;
pub const ABSENT: u16 = u16::MAX;

/// Census code straight from the definition, `None` where the window leaves
/// the frame.
pub fn naive_census(img: &GrayImage, x: usize, y: usize) -> Option<u64> {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let (x, y) = (x as i64, y as i64);
    if x < 3 || y < 3 || x + 3 >= w || y + 3 >= h {
        return None;
    }
    let c = img.get(x as usize, y as usize);
    let mut code = 0u64;
    let mut bit = 0;
    for dy in -3..=3 {
        for dx in -3..=3 {
            if dx == 0 && dy == 0 {
                continue;
            }
            if img.get((x + dx) as usize, (y + dy) as usize) < c {
                code |= 1 << bit;
            }
            bit += 1;
        }
    }
    Some(code)
}

/// Codes of every pixel, `None` in the margin.
pub fn naive_census_image(img: &GrayImage) -> Vec<Option<u64>> {
    (0..img.width() * img.height())
        .map(|i| naive_census(img, i % img.width(), i / img.width()))
        .collect()
}

/// Aggregated cost by summing all 49 window Hamming distances; `ABSENT` if
/// any of them involves an undefined code or leaves the right image.
pub fn naive_cost(
    left: &[Option<u64>],
    right: &[Option<u64>],
    w: usize,
    h: usize,
    x: usize,
    y: usize,
    d: usize,
) -> u16 {
    let mut sum = 0u32;
    for dy in -3i64..=3 {
        for dx in -3i64..=3 {
            let (u, v) = (x as i64 + dx, y as i64 + dy);
            let ur = u - d as i64;
            if u < 0 || v < 0 || ur < 0 || u >= w as i64 || v >= h as i64 {
                return ABSENT;
            }
            let row = v as usize * w;
            match (left[row + u as usize], right[row + ur as usize]) {
                (Some(a), Some(b)) => sum += (a ^ b).count_ones(),
                _ => return ABSENT,
            }
        }
    }
    sum as u16
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveStats {
    pub best_d: usize,
    pub c1: u16,
    pub c2: u16,
    pub c_prev: u16,
    pub c_next: u16,
    pub fixed: u16,
}

/// Full scan over all 64 candidates.
pub fn naive_wta(costs: &[u16]) -> Option<NaiveStats> {
    let mut best: Option<usize> = None;
    for d in 0..D {
        if costs[d] != ABSENT && best.is_none_or(|b| costs[d] < costs[b]) {
            best = Some(d);
        }
    }
    let b = best?;
    let c1 = costs[b];
    let mut c2 = ABSENT;
    for d in 0..D {
        if costs[d] != ABSENT && (d as i64 - b as i64).abs() >= 2 && costs[d] < c2 {
            c2 = costs[d];
        }
    }
    let c_prev = if b > 0 { costs[b - 1] } else { ABSENT };
    let c_next = if b + 1 < D { costs[b + 1] } else { ABSENT };
    let mut delta = 0.0;
    if c_prev != ABSENT && c_next != ABSENT {
        let (p, c, n) = (c_prev as f64, c1 as f64, c_next as f64);
        let den = p - 2.0 * c + n;
        if den > 0.0 {
            delta = ((p - n) / (2.0 * den)).clamp(-0.5, 0.5);
        }
    }
    let fixed = (((b as f64 + delta) * 32.0).round() as u16).max(1);
    Some(NaiveStats {
        best_d: b,
        c1,
        c2,
        c_prev,
        c_next,
        fixed,
    })
}

pub struct NaiveResult {
    pub costs: Vec<u16>,
    pub stats: Vec<Option<NaiveStats>>,
    pub right: Vec<Option<usize>>,
}

pub fn naive_match(left: &GrayImage, right: &GrayImage) -> NaiveResult {
    let (w, h) = (left.width(), left.height());
    let (lc, rc) = (naive_census_image(left), naive_census_image(right));
    let mut costs = vec![ABSENT; w * h * D];
    for y in 0..h {
        for x in 0..w {
            for d in 0..D {
                costs[(y * w + x) * D + d] = naive_cost(&lc, &rc, w, h, x, y, d);
            }
        }
    }
    let stats = (0..w * h)
        .map(|i| naive_wta(&costs[i * D..(i + 1) * D]))
        .collect();
    let mut rmap = vec![None; w * h];
    for y in 0..h {
        for xr in 0..w {
            let mut best: Option<(usize, u16)> = None;
            for d in 0..D {
                if xr + d >= w {
                    break;
                }
                let c = costs[(y * w + xr + d) * D + d];
                if c != ABSENT && best.is_none_or(|(_, bc)| c < bc) {
                    best = Some((d, c));
                }
            }
            rmap[y * w + xr] = best.map(|(d, _)| d);
        }
    }
    NaiveResult {
        costs,
        stats,
        right: rmap,
    }
}

pub fn random_image(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut rng = CounterRng::new(seed);
    GrayImage::from_fn(w, h, BitDepth::Eight, |_, _| rng.random_range(0..256u16))
}

/// Pair with true disparity `shift`: `right(x - shift) = left(x)`.
pub fn shifted_pair(w: usize, h: usize, shift: usize, seed: u64) -> (GrayImage, GrayImage) {
    let big = random_image(w + shift, h, seed);
    let left = GrayImage::from_fn(w, h, BitDepth::Eight, |x, y| big.get(x, y));
    let right = GrayImage::from_fn(w, h, BitDepth::Eight, |x, y| big.get(x + shift, y));
    (left, right)
}

pub fn rig(width: usize, height: usize) -> StereoRig {
    StereoRig::new(Intrinsics::pinhole(477.0, 477.0, width, height), 0.07).unwrap()
}

pub fn wall(width: usize, height: usize, plane: PlaneGeometry, seed: u64) -> RenderedPair {
    let mut s = PlaneScene::new(rig(width, height), width, height, plane);
    s.seed = seed;
    render_plane_pair(&s).unwrap()
}

/// Independent default-noise draws for both views.
pub fn noisy(pair: &RenderedPair, seed: u64) -> (GrayImage, GrayImage) {
    let p = NoiseParams::default();
    (
        add_sensor_noise(&pair.left, &p.with_seed(derive_seed(seed, 1))).unwrap(),
        add_sensor_noise(&pair.right, &p.with_seed(derive_seed(seed, 2))).unwrap(),
    )
}
