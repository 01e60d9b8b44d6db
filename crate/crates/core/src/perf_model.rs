//! Closed-form performance models of a fixed-baseline stereo camera.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Static disparity RMS of the reference hardware, in pixels.
pub const DEFAULT_DISPARITY_RMS: f64 = 0.08;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("planar bias is defined for d > sqrt(2), got {0}")]
    BiasDomain(f64),
    #[error("{name} must be {requirement}, got {value}")]
    Domain {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

/// Constant disparity-space error and the `f * B` product it is scaled by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModel {
    /// Disparity RMS in pixels.
    pub eps_d: f64,
    /// Focal length times baseline, meter-pixels.
    pub fb: f64,
}

impl ErrorModel {
    pub fn new(eps_d: f64, fb: f64) -> Result<Self, ModelError> {
        positive("eps_d", eps_d)?;
        positive("fb", fb)?;
        Ok(Self { eps_d, fb })
    }
}

/// Depth error at one distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthError {
    /// RMS depth error in meters.
    pub eps_m: f64,
    /// RMS depth error as a fraction of distance.
    pub eps_frac: f64,
}

/// Propagates a constant disparity error to depth:
/// `eps_z = z^2 * eps_d / (f B)` and `eps_z / z = eps_d * z / (f B)`.
pub fn depth_rms(z: f64, m: &ErrorModel) -> Result<DepthError, ModelError> {
    positive("z", z)?;
    Ok(DepthError {
        eps_m: z * z * m.eps_d / m.fb,
        eps_frac: m.eps_d * z / m.fb,
    })
}

/// Bias of a planar stereo reconstruction, `-d / (2 d^2 - 1)` pixels.
pub fn planar_bias(d: f64) -> Result<f64, ModelError> {
    if !(d > std::f64::consts::SQRT_2) || !d.is_finite() {
        return Err(ModelError::BiasDomain(d));
    }
    Ok(-d / (2.0 * d * d - 1.0))
}

/// Measurement conditions relative to a white, perpendicular, on-axis wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeScenario {
    /// Range at which a white wall still returns 95% of its pixels, meters.
    pub r95: f64,
    /// Surface albedo in `(0, 1]`.
    pub albedo: f64,
    /// Target tilt relative to the camera plane, degrees.
    pub theta_target_deg: f64,
    /// Angle off the optical axis, degrees.
    pub theta_fov_deg: f64,
}

impl RangeScenario {
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("r95", self.r95)?;
        if !(self.albedo > 0.0 && self.albedo <= 1.0) {
            return Err(ModelError::Domain {
                name: "albedo",
                requirement: "in (0, 1]",
                value: self.albedo,
            });
        }
        for (name, v) in [
            ("theta_target_deg", self.theta_target_deg),
            ("theta_fov_deg", self.theta_fov_deg),
        ] {
            if !(0.0..90.0).contains(&v) {
                return Err(ModelError::Domain {
                    name,
                    requirement: "in [0, 90) degrees",
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// SNR-limited range under other conditions:
/// `r95 * sqrt(cos(θ_target) * α * cos(θ_fov)^7)`.
///
/// The seventh power combines `cos^4` lens vignetting with roughly `cos^3`
/// projector falloff; the square root is the inverse-square law.
pub fn expected_range(s: &RangeScenario) -> Result<f64, ModelError> {
    s.validate()?;
    let ct = s.theta_target_deg.to_radians().cos();
    let cf = s.theta_fov_deg.to_radians().cos();
    Ok(s.r95 * (ct * s.albedo * cf.powi(7)).sqrt())
}

/// Photon-limited range at another frame rate: `r * sqrt(fps_ref / fps)`.
pub fn framerate_range_scale(r95_ref: f64, fps_ref: f64, fps: f64) -> Result<f64, ModelError> {
    positive("r95_ref", r95_ref)?;
    positive("fps_ref", fps_ref)?;
    positive("fps", fps)?;
    Ok(r95_ref * (fps_ref / fps).sqrt())
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::Domain {
            name,
            requirement: "positive and finite",
            value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_rms_examples() {
        let m = ErrorModel::new(0.08, 38.1).unwrap();
        let e1 = depth_rms(1.0, &m).unwrap();
        assert!((e1.eps_m - 0.0021).abs() < 5e-5);
        let e2 = depth_rms(2.0, &m).unwrap();
        assert!((e2.eps_m / e1.eps_m - 4.0).abs() < 1e-12);
        assert!((e2.eps_frac / e1.eps_frac - 2.0).abs() < 1e-12);
        for z in [0.5, 1.0, 3.0, 7.0] {
            let e = depth_rms(z, &m).unwrap();
            assert!((e.eps_frac * m.fb / z - m.eps_d).abs() < 1e-15);
        }
        assert!(depth_rms(0.0, &m).is_err());
        assert!(ErrorModel::new(-1.0, 38.1).is_err());
    }

    #[test]
    fn planar_bias_examples() {
        assert!((planar_bias(2.0).unwrap() + 2.0 / 7.0).abs() < 1e-15);
        assert!((planar_bias(10.0).unwrap() + 10.0 / 199.0).abs() < 1e-15);
        assert!(planar_bias(std::f64::consts::SQRT_2).is_err());
        assert!(planar_bias(1.0).is_err());
        let mut prev = planar_bias(2.0).unwrap().abs();
        for d in 3..200 {
            let b = planar_bias(f64::from(d)).unwrap();
            assert!(b < 0.0 && b.abs() < prev);
            prev = b.abs();
        }
    }

    #[test]
    fn expected_range_examples() {
        let base = RangeScenario {
            r95: 6.0,
            albedo: 1.0,
            theta_target_deg: 0.0,
            theta_fov_deg: 0.0,
        };
        assert_eq!(expected_range(&base).unwrap(), 6.0);
        let quarter = RangeScenario {
            albedo: 0.25,
            ..base
        };
        assert!((expected_range(&quarter).unwrap() - 3.0).abs() < 1e-12);
        let floor = RangeScenario {
            albedo: 0.2,
            theta_target_deg: 60.0,
            theta_fov_deg: 15.0,
            ..base
        };
        assert!((expected_range(&floor).unwrap() - 1.68).abs() < 5e-3);
        assert!(expected_range(&RangeScenario {
            albedo: 0.0,
            ..base
        })
        .is_err());
        assert!(expected_range(&RangeScenario {
            theta_fov_deg: 90.0,
            ..base
        })
        .is_err());
    }

    #[test]
    fn framerate_examples() {
        assert_eq!(framerate_range_scale(6.0, 30.0, 30.0).unwrap(), 6.0);
        assert!((framerate_range_scale(6.0, 30.0, 90.0).unwrap() - 3.464).abs() < 1e-3);
        assert!((framerate_range_scale(6.0, 30.0, 120.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(framerate_range_scale(6.0, 0.0, 30.0).is_err());
    }
}
