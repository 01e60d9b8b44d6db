//! Cleans a raw, unfiltered disparity map with speckle removal, a median
//! filter and quantization, scoring each stage.

use census_stereo::eval::compute_metrics;
use census_stereo::interest::Thresholds;
use census_stereo::matcher::{match_images, BORDER};
use census_stereo::noise::{add_sensor_noise, NoiseParams};
use census_stereo::pixel::ValidityMask;
use census_stereo::postproc::{median_filter, quantize_disparity, speckle_filter, SpeckleParams};
use census_stereo::synth::{render_plane_pair, PlaneScene};

#[derive(Debug)]
pub struct Stage {
    pub name: &'static str,
    pub valid: usize,
    pub bad20: f64,
    pub avg_err: f64,
}

pub fn run_example() -> anyhow::Result<Vec<Stage>> {
    let (w, h, truth) = (200, 120, 24.4);
    let pair = render_plane_pair(&PlaneScene::constant_disparity(w, h, truth))?;
    let noise = NoiseParams {
        read_sigma: 6.0,
        ..NoiseParams::default()
    };
    let left = add_sensor_noise(&pair.left, &noise.with_seed(3))?;
    let right = add_sensor_noise(&pair.right, &noise.with_seed(4))?;

    let raw = match_images(&left, &right, &Thresholds::off())?;
    let despeckled = speckle_filter(
        &raw,
        &SpeckleParams {
            max_region_size: 40,
            similarity_tol: 1.0,
        },
    )?;
    let smoothed = median_filter(&despeckled, 3)?;
    let quantized = quantize_disparity(&smoothed, 0.25)?;

    // Score only where the true match is inside the search window.
    let x0 = BORDER + f64::ceil(truth) as usize;
    let roi: Vec<bool> = (0..w * h)
        .map(|i| (x0..w - BORDER).contains(&(i % w)) && (BORDER..h - BORDER).contains(&(i / w)))
        .collect();
    let roi = ValidityMask::new(w, h, roi)?;

    [
        ("raw", raw),
        ("speckle", despeckled),
        ("median 3x3", smoothed),
        ("quantize 1/4", quantized),
    ]
    .into_iter()
    .map(|(name, map)| {
        let m = compute_metrics(&map, &pair.gt, Some(&roi))?;
        Ok(Stage {
            name,
            valid: map.valid_count(),
            bad20: m.bad20,
            avg_err: m.avg_err,
        })
    })
    .collect()
}

fn main() -> anyhow::Result<()> {
    println!(
        "{:<14} {:>7} {:>8} {:>9}",
        "stage", "valid", "bad2.0", "avg err"
    );
    for s in run_example()? {
        println!(
            "{:<14} {:>7} {:>7.2}% {:>7.4} px",
            s.name,
            s.valid,
            100.0 * s.bad20,
            s.avg_err
        );
    }
    Ok(())
}
