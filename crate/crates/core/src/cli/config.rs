//! JSON run configuration shared by every subcommand. Flags override it.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::camera::{Intrinsics, StereoRig};
use crate::interest::{preset_thresholds, PresetName, Thresholds};
use crate::noise::NoiseParams;
use crate::postproc::SpeckleParams;
use crate::synth::{DotTexture, PlaneGeometry};

/// Focal length of the rig used when neither config nor flags set one.
pub const DEFAULT_FX: f64 = 477.0;
/// Baseline of the rig used when neither config nor flags set one.
pub const DEFAULT_BASELINE: f64 = 0.07;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub rig: Option<StereoRig>,
    pub preset: Option<PresetName>,
    /// Partial threshold record layered over the preset.
    pub thresholds: Option<Map<String, Value>>,
    pub noise: Option<NoiseParams>,
    pub scene: Option<SceneConfig>,
    pub speckle: Option<SpeckleParams>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    pub plane: PlaneGeometry,
    pub texture: DotTexture,
    pub bit_depth: u8,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            width: 480,
            height: 360,
            plane: PlaneGeometry::FrontoParallel { z0: 1.0 },
            texture: DotTexture::default(),
            bit_depth: 8,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Preset (flag, then config, then Off) with config overrides applied.
    pub fn thresholds(&self, flag: Option<PresetName>) -> Result<(PresetName, Thresholds)> {
        let name = flag.or(self.preset).unwrap_or(PresetName::Off);
        let mut th = preset_thresholds(name);
        if let Some(overrides) = &self.thresholds {
            let mut base = serde_json::to_value(&th)?;
            merge(&mut base, overrides);
            th = serde_json::from_value(base).context("applying threshold overrides")?;
        }
        th.validate()?;
        Ok((name, th))
    }

    /// Rig from config, with individual flags taking precedence.
    pub fn rig(
        &self,
        fx: Option<f64>,
        baseline: Option<f64>,
        width: usize,
        height: usize,
    ) -> Result<StereoRig> {
        let mut rig = match self.rig {
            Some(r) => r,
            None => StereoRig {
                intrinsics: Intrinsics::pinhole(DEFAULT_FX, DEFAULT_FX, width, height),
                baseline: DEFAULT_BASELINE,
            },
        };
        if let Some(fx) = fx {
            if self.rig.is_none() {
                rig.intrinsics.fy = fx;
            }
            rig.intrinsics.fx = fx;
        }
        if let Some(b) = baseline {
            rig.baseline = b;
        }
        Ok(StereoRig::new(rig.intrinsics, rig.baseline)?)
    }

    pub fn seed(&self, flag: Option<u64>) -> Option<u64> {
        flag.or(self.seed)
    }
}

fn merge(base: &mut Value, overrides: &Map<String, Value>) {
    let Value::Object(target) = base else {
        return;
    };
    for (k, v) in overrides {
        match (target.get_mut(k), v) {
            (Some(existing @ Value::Object(_)), Value::Object(inner)) => merge(existing, inner),
            _ => {
                target.insert(k.clone(), v.clone());
            }
        }
    }
}

pub fn ensure_positive_threads(n: usize) -> Result<usize> {
    if n == 0 {
        bail!("--threads must be at least 1");
    }
    Ok(n)
}
