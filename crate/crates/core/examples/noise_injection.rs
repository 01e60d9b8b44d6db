//! Adds sensor noise to a flat grey frame and compares the spread of each
//! component against its nominal size.

use census_stereo::noise::{add_sensor_noise, NoiseParams};
use census_stereo::pixel::{BitDepth, GrayImage};

#[derive(Debug)]
pub struct Summary {
    pub level: f64,
    pub rows: Vec<Row>,
}

#[derive(Debug)]
pub struct Row {
    pub label: &'static str,
    pub mean: f64,
    pub std: f64,
    /// Standard deviation expected from the model, including rounding.
    pub nominal: f64,
}

type Variant = (&'static str, f64, fn(&mut NoiseParams));

fn stats(img: &GrayImage) -> (f64, f64) {
    let n = img.samples().len() as f64;
    let mean = img.samples().iter().map(|&v| f64::from(v)).sum::<f64>() / n;
    let var = img
        .samples()
        .iter()
        .map(|&v| (f64::from(v) - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run_example() -> anyhow::Result<Summary> {
    let level = 128u16;
    let d = NoiseParams::default();
    // Shot noise in DN at this level: sqrt(electrons) / gain.
    let shot2 = f64::from(level) * 255.0 / d.full_well;
    let read2 = d.read_sigma * d.read_sigma;
    let flat = GrayImage::filled(256, 256, BitDepth::Eight, level);
    let mut rows = Vec::new();
    let variants: [Variant; 3] = [
        ("read only", read2, |p| p.photon = false),
        ("photon only", shot2, |p| p.read = false),
        ("both", read2 + shot2, |_| {}),
    ];
    for (label, var, tweak) in variants {
        let mut p = NoiseParams {
            blur: false,
            seed: 42,
            ..d
        };
        tweak(&mut p);
        let (mean, std) = stats(&add_sensor_noise(&flat, &p)?);
        let nominal = (var + 1.0 / 12.0).sqrt();
        rows.push(Row {
            label,
            mean,
            std,
            nominal,
        });
    }
    Ok(Summary {
        level: f64::from(level),
        rows,
    })
}

fn main() -> anyhow::Result<()> {
    let s = run_example()?;
    println!("flat 8-bit frame at {} DN, blur off", s.level);
    for r in &s.rows {
        println!(
            "  {:<12} mean {:>7.2}  std {:.3} (model {:.3})",
            r.label, r.mean, r.std, r.nominal
        );
    }
    Ok(())
}
