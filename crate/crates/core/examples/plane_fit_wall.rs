//! Measures depth noise the way a lab would: image a flat wall, back-project
//! every valid pixel, fit a plane and take the RMS residual. The result is
//! compared with the closed-form prediction.

use census_stereo::camera::{deproject, disparity_to_depth, Intrinsics, StereoRig};
use census_stereo::eval::plane_fit_rms;
use census_stereo::interest::{preset_thresholds, PresetName};
use census_stereo::matcher::match_images;
use census_stereo::noise::{add_sensor_noise, NoiseParams};
use census_stereo::perf_model::{depth_rms, ErrorModel};
use census_stereo::synth::{render_plane_pair, PlaneGeometry, PlaneScene};

#[derive(Debug)]
pub struct Summary {
    pub z0: f64,
    pub points: usize,
    pub measured_rms_m: f64,
    /// Disparity RMS against ground truth over the same pixels.
    pub eps_d: f64,
    /// Depth RMS predicted from `eps_d`.
    pub predicted_rms_m: f64,
}

pub fn run_example() -> anyhow::Result<Summary> {
    let (w, h, z0) = (320, 240, 1.0);
    let rig = StereoRig::new(Intrinsics::pinhole(477.0, 477.0, w, h), 0.07)?;
    let mut scene = PlaneScene::new(rig, w, h, PlaneGeometry::FrontoParallel { z0 });
    scene.seed = 5;
    let pair = render_plane_pair(&scene)?;
    let noise = NoiseParams::default();
    let left = add_sensor_noise(&pair.left, &noise.with_seed(21))?;
    let right = add_sensor_noise(&pair.right, &noise.with_seed(22))?;
    let map = match_images(&left, &right, &preset_thresholds(PresetName::Medium))?;

    let mut points = Vec::new();
    let mut sq = 0.0;
    for y in 0..h {
        for x in 0..w {
            let Some(d) = map.disparity_px(x, y) else {
                continue;
            };
            let z = disparity_to_depth(d, &rig).expect("valid disparity is positive");
            points.push(deproject(x as f64, y as f64, z, &rig.intrinsics));
            sq += (d - pair.gt.get(x, y)).powi(2);
        }
    }
    let fit = plane_fit_rms(&points)?;
    let eps_d = (sq / points.len() as f64).sqrt();
    let predicted = depth_rms(z0, &ErrorModel::new(eps_d, rig.focal_baseline())?)?;
    Ok(Summary {
        z0,
        points: points.len(),
        measured_rms_m: fit.rms,
        eps_d,
        predicted_rms_m: predicted.eps_m,
    })
}

fn main() -> anyhow::Result<()> {
    let s = run_example()?;
    println!("wall at {} m, {} points", s.z0, s.points);
    println!("disparity RMS        {:.4} px", s.eps_d);
    println!("plane-fit depth RMS  {:.3} mm", 1e3 * s.measured_rms_m);
    println!("predicted depth RMS  {:.3} mm", 1e3 * s.predicted_rms_m);
    Ok(())
}
