//! Depth/disparity conversion, back-projection, lens distortion and the
//! rig's reportable depth interval.

use census_stereo::camera::{
    deproject, depth_to_disparity, disparity_to_depth, distort_point, operating_range,
    undistort_point, DistortionModel, Intrinsics, StereoRig,
};

#[derive(Debug)]
pub struct Summary {
    pub depth_at_42: f64,
    pub disparity_at_1m: f64,
    pub corner_point: [f64; 3],
    pub distorted: (f64, f64),
    pub undistort_residual: f64,
    pub z_min: f64,
    pub z_max: f64,
}

pub fn run_example() -> anyhow::Result<Summary> {
    let rig = StereoRig::new(Intrinsics::pinhole(600.0, 600.0, 640, 480), 0.07)?;
    let depth_at_42 = disparity_to_depth(42.0, &rig).expect("positive disparity");
    let disparity_at_1m = depth_to_disparity(1.0, &rig).expect("positive depth");
    let corner_point = deproject(0.0, 0.0, 2.0, &rig.intrinsics);

    let mut lens = rig.intrinsics;
    lens.model = DistortionModel::ModifiedBrownConrady;
    lens.k1 = -0.12;
    lens.k2 = 0.03;
    lens.p1 = 1e-3;
    lens.p2 = -5e-4;
    let (xn, yn) = (0.4, -0.3);
    let distorted = distort_point(xn, yn, &lens);
    let (ux, uy) = undistort_point(distorted.0, distorted.1, &lens);
    let undistort_residual = (ux - xn).hypot(uy - yn);

    let (z_min, z_max) = operating_range(&rig);
    Ok(Summary {
        depth_at_42,
        disparity_at_1m,
        corner_point,
        distorted,
        undistort_residual,
        z_min,
        z_max,
    })
}

fn main() -> anyhow::Result<()> {
    let s = run_example()?;
    println!("d = 42 px        -> z = {:.4} m", s.depth_at_42);
    println!("z = 1 m          -> d = {:.4} px", s.disparity_at_1m);
    println!("pixel (0,0) @ 2m -> {:?}", s.corner_point);
    println!(
        "(0.4,-0.3) distorts to ({:.5}, {:.5}), round trip error {:.1e}",
        s.distorted.0, s.distorted.1, s.undistort_residual
    );
    println!("reportable depth  {:.3} m .. {:.1} m", s.z_min, s.z_max);
    Ok(())
}
