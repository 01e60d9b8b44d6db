//! Scores a matcher run against ground truth with the usual bad-pixel
//! fractions, median and mean error, and validity.

use census_stereo::eval::netpbm::{read_pfm, write_pfm};
use census_stereo::eval::{compute_metrics, MetricsReport};
use census_stereo::interest::{preset_thresholds, PresetName};
use census_stereo::matcher::match_images;
use census_stereo::noise::{add_sensor_noise, NoiseParams};
use census_stereo::pixel::ValidityMask;
use census_stereo::synth::{render_plane_pair, PlaneGeometry, PlaneScene};

#[derive(Debug)]
pub struct Summary {
    pub full: MetricsReport,
    /// Same run restricted to the left half of the frame.
    pub left_half: MetricsReport,
}

pub fn run_example() -> anyhow::Result<Summary> {
    let mut scene = PlaneScene::constant_disparity(240, 160, 0.0);
    scene.plane = PlaneGeometry::Ramp {
        a: 20.0,
        b: -0.04,
        c: 0.03,
    };
    let pair = render_plane_pair(&scene)?;
    let noise = NoiseParams::default();
    let left = add_sensor_noise(&pair.left, &noise.with_seed(11))?;
    let right = add_sensor_noise(&pair.right, &noise.with_seed(12))?;
    let map = match_images(&left, &right, &preset_thresholds(PresetName::Medium))?;

    // Ground truth usually arrives as a PFM file.
    let gt = read_pfm(&write_pfm(&pair.gt))?;
    let full = compute_metrics(&map, &gt, None)?;
    let (w, h) = (map.width(), map.height());
    let half = ValidityMask::new(w, h, (0..w * h).map(|i| i % w < w / 2).collect())?;
    let left_half = compute_metrics(&map, &gt, Some(&half))?;
    Ok(Summary { full, left_half })
}

fn main() -> anyhow::Result<()> {
    let s = run_example()?;
    println!("{}", serde_json::to_string_pretty(&s.full)?);
    println!(
        "left half only: bad1.0 {:.2}%, validity {:.1}%",
        100.0 * s.left_half.bad10,
        100.0 * s.left_half.validity
    );
    Ok(())
}
