//! Sensor noise synthesis: optical blur, photon shot noise and read noise.
//!
//! The stages run in a fixed order on floating-point intensities:
//!
//! 1. separable Gaussian blur (kernel truncated at 3σ, edges replicated);
//! 2. photon noise: `e = I / I_max * full_well` electrons, `Poisson(e)`,
//!    scaled back to digital numbers;
//! 3. additive Gaussian read noise `N(0, read_sigma²)` in digital numbers;
//! 4. rounding and clamping to `[0, 2^bits - 1]`.
//!
//! Randomness comes from one [`CounterRng`] stream per pixel keyed by the
//! seed and the pixel index, so the output does not depend on evaluation
//! order or thread count.

use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pixel::GrayImage;
use crate::rng::CounterRng;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("{name} must be a non-negative finite number, got {value}")]
    Parameter { name: &'static str, value: f64 },
}

/// Noise magnitudes and per-stage switches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseParams {
    /// Electrons collected at saturation.
    pub full_well: f64,
    /// Read-noise standard deviation in digital numbers.
    pub read_sigma: f64,
    /// Blur kernel standard deviation in pixels.
    pub blur_sigma: f64,
    pub seed: u64,
    pub photon: bool,
    pub read: bool,
    pub blur: bool,
}

impl Default for NoiseParams {
    /// Webcam-grade defaults: 1500 e⁻ full well, 2 DN read noise, 0.6 px blur.
    fn default() -> Self {
        Self {
            full_well: 1500.0,
            read_sigma: 2.0,
            blur_sigma: 0.6,
            seed: 0,
            photon: true,
            read: true,
            blur: true,
        }
    }
}

impl NoiseParams {
    /// Every stage disabled.
    pub fn disabled() -> Self {
        Self {
            photon: false,
            read: false,
            blur: false,
            ..Self::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for (name, value) in [
            ("full_well", self.full_well),
            ("read_sigma", self.read_sigma),
            ("blur_sigma", self.blur_sigma),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(NoiseError::Parameter { name, value });
            }
        }
        if self.photon && self.full_well <= 0.0 {
            return Err(NoiseError::Parameter {
                name: "full_well",
                value: self.full_well,
            });
        }
        Ok(())
    }
}

/// Normalized Gaussian taps for `sigma`, truncated at `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Separable Gaussian blur with edge replication, returned as floats.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let src: Vec<f64> = img.samples().iter().map(|&v| f64::from(v)).collect();
    if sigma <= 0.0 {
        return src;
    }
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as isize;
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let mut horiz = vec![0.0; w * h];
    horiz.par_chunks_mut(w).enumerate().for_each(|(y, out)| {
        let row = &src[y * w..(y + 1) * w];
        for (x, o) in out.iter_mut().enumerate() {
            *o = k
                .iter()
                .enumerate()
                .map(|(i, &t)| t * row[clamp(x as isize + i as isize - r, w)])
                .sum();
        }
    });
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            *o = k
                .iter()
                .enumerate()
                .map(|(i, &t)| t * horiz[clamp(y as isize + i as isize - r, h) * w + x])
                .sum();
        }
    });
    out
}

/// Adds blur, photon and read noise to `img`; see the module docs for the
/// exact model. With every stage disabled the input is returned unchanged.
pub fn add_sensor_noise(img: &GrayImage, p: &NoiseParams) -> Result<GrayImage, NoiseError> {
    p.validate()?;
    if !(p.photon || p.read || p.blur) {
        return Ok(img.clone());
    }
    let blurred = if p.blur {
        gaussian_blur(img, p.blur_sigma)
    } else {
        img.samples().iter().map(|&v| f64::from(v)).collect()
    };
    let max = f64::from(img.bit_depth().max_value());
    let read = (p.read && p.read_sigma > 0.0)
        .then(|| Normal::new(0.0, p.read_sigma).expect("sigma validated"));
    let gain = p.full_well / max;

    let samples: Vec<u16> = blurred
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut rng = CounterRng::for_pixel(p.seed, i);
            let mut s = v;
            if p.photon {
                let electrons = (s * gain).max(0.0);
                s = if electrons > 0.0 {
                    Poisson::new(electrons)
                        .expect("finite positive rate")
                        .sample(&mut rng)
                        / gain
                } else {
                    0.0
                };
            }
            if let Some(n) = &read {
                s += n.sample(&mut rng);
            }
            s.round().clamp(0.0, max) as u16
        })
        .collect();
    Ok(
        GrayImage::new(img.width(), img.height(), img.bit_depth(), samples)
            .expect("samples clamped to bit depth"),
    )
}
