//! Renders a slanted textured wall, writes the stereo pair and ground truth
//! as PGM/PFM, and reads them back.
//!
//! ```text
//! cargo run --example synth_scene -- out_dir
//! ```

use std::path::{Path, PathBuf};

use census_stereo::camera::{Intrinsics, StereoRig};
use census_stereo::eval::netpbm::{load_pfm, load_pgm, save_pfm, save_pgm};
use census_stereo::pixel::BitDepth;
use census_stereo::synth::{render_plane_pair, DotTexture, PlaneGeometry, PlaneScene};

#[derive(Debug)]
pub struct Summary {
    pub files: Vec<PathBuf>,
    pub gt_range: (f64, f64),
    pub exceeds_search_range: bool,
}

pub fn run_example(out_dir: &Path) -> anyhow::Result<Summary> {
    std::fs::create_dir_all(out_dir)?;
    let rig = StereoRig::new(Intrinsics::pinhole(477.0, 477.0, 320, 240), 0.07)?;
    let mut scene = PlaneScene::new(
        rig,
        320,
        240,
        PlaneGeometry::Ramp {
            a: 10.0,
            b: 0.08,
            c: -0.02,
        },
    );
    scene.texture = DotTexture {
        density: 10.0,
        ..DotTexture::default()
    };
    scene.bit_depth = BitDepth::Ten;
    scene.seed = 2024;
    let pair = render_plane_pair(&scene)?;

    let files = ["left.pgm", "right.pgm", "gt.pfm"].map(|n| out_dir.join(n));
    save_pgm(&files[0], &pair.left)?;
    save_pgm(&files[1], &pair.right)?;
    save_pfm(&files[2], &pair.gt)?;

    anyhow::ensure!(
        load_pgm(&files[0], Some(BitDepth::Ten))? == pair.left,
        "left image changed on disk"
    );
    anyhow::ensure!(
        load_pgm(&files[1], Some(BitDepth::Ten))? == pair.right,
        "right image changed on disk"
    );
    // PFM stores single precision.
    let back = load_pfm(&files[2])?;
    let same = back
        .values()
        .iter()
        .zip(pair.gt.values())
        .all(|(&a, &b)| a == f64::from(b as f32));
    anyhow::ensure!(same, "ground truth changed on disk");

    let gt_range = pair
        .gt
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| {
            (lo.min(d), hi.max(d))
        });
    Ok(Summary {
        files: files.to_vec(),
        gt_range,
        exceeds_search_range: pair.exceeds_search_range,
    })
}

fn main() -> anyhow::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map_or_else(|| PathBuf::from("synth_out"), PathBuf::from);
    let s = run_example(&dir)?;
    for f in &s.files {
        println!("wrote {}", f.display());
    }
    println!(
        "ground truth spans {:.3} .. {:.3} px",
        s.gt_range.0, s.gt_range.1
    );
    if s.exceeds_search_range {
        println!("part of the wall is closer than the matcher can see");
    }
    Ok(())
}
