//! Matches a rendered pair with a known constant disparity and reports how
//! close the subpixel estimates land.
//!
//! ```text
//! cargo run --example match_pair
//! ```

use census_stereo::interest::Thresholds;
use census_stereo::matcher::{match_images, BORDER};
use census_stereo::synth::{render_plane_pair, PlaneScene};

#[derive(Debug)]
pub struct Summary {
    pub truth: f64,
    pub valid: usize,
    pub mean: f64,
    pub max_abs_err: f64,
}

pub fn run_example() -> anyhow::Result<Summary> {
    let truth = 17.25;
    let pair = render_plane_pair(&PlaneScene::constant_disparity(160, 96, truth))?;
    let map = match_images(&pair.left, &pair.right, &Thresholds::off())?;

    // Left of `x0` the true match lies outside the right image.
    let x0 = BORDER + truth.ceil() as usize;
    let mut errs = Vec::new();
    for y in BORDER..map.height() - BORDER {
        for x in x0..map.width() - BORDER {
            if let Some(d) = map.disparity_px(x, y) {
                errs.push(d - truth);
            }
        }
    }
    anyhow::ensure!(!errs.is_empty(), "no pixel was in range");
    let mean = truth + errs.iter().sum::<f64>() / errs.len() as f64;
    let max_abs_err = errs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    Ok(Summary {
        truth,
        valid: errs.len(),
        mean,
        max_abs_err,
    })
}

fn main() -> anyhow::Result<()> {
    let s = run_example()?;
    println!("true disparity   {:.4} px", s.truth);
    println!("matched pixels   {}", s.valid);
    println!("mean estimate    {:.4} px", s.mean);
    println!("worst error      {:.4} px", s.max_abs_err);
    Ok(())
}
