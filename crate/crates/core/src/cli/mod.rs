//! The `census-stereo` command line.
//!
//! Every subcommand prints one JSON document on stdout; diagnostics go to
//! stderr. Output files are written only after every computation succeeded,
//! each through a temporary file and rename.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::camera::{operating_range, StereoRig};
use crate::eval::netpbm::{
    disparity_to_pgm, load_disparity, load_pfm, load_pgm, write_file_atomic, write_pfm, write_pgm,
};
use crate::eval::{compute_metrics, MetricsReport};
use crate::interest::{PresetName, Thresholds};
use crate::matcher::match_images_detailed;
use crate::noise::add_sensor_noise;
use crate::perf_model::{
    depth_rms, expected_range, framerate_range_scale, planar_bias, ErrorModel, RangeScenario,
    DEFAULT_DISPARITY_RMS,
};
use crate::pixel::{BitDepth, DisparityMap, ValidityMask};
use crate::postproc::{median_filter, quantize_disparity, speckle_filter, SpeckleParams};
use crate::synth::{render_plane_pair, PlaneGeometry, PlaneScene};

use config::{ensure_positive_threads, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "census-stereo",
    version,
    about = "Census block-matching stereo toolkit"
)]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Seed for every random stage.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Match a rectified left/right PGM pair.
    Match(MatchArgs),
    /// Score a disparity map against ground truth.
    Eval(EvalArgs),
    /// Render a synthetic textured-plane pair with ground truth.
    Synth(SynthArgs),
    /// Add blur, photon and read noise to a PGM.
    Noise(NoiseArgs),
    /// Closed-form range and error calculators.
    #[command(subcommand)]
    Predict(PredictCommand),
    /// Apply speckle, median and quantization filters in flag order.
    Postproc(PostprocArgs),
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    /// off, low, medium or high.
    #[arg(long)]
    pub preset: Option<PresetName>,
    /// Disparity output: `.pgm` stores 1/32 px codes, anything else PFM pixels.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted disparity (PFM pixels or 16-bit PGM codes).
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground truth PFM, non-finite = unknown.
    #[arg(long)]
    pub gt: PathBuf,
    /// Optional PGM; nonzero pixels are evaluated.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out_left: PathBuf,
    #[arg(long)]
    pub out_right: PathBuf,
    #[arg(long)]
    pub out_gt: PathBuf,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Fronto-parallel wall distance in meters.
    #[arg(long, conflicts_with = "disparity")]
    pub z0: Option<f64>,
    /// Disparity ramp offset `a` in pixels.
    #[arg(long)]
    pub disparity: Option<f64>,
    /// Ramp slope per column.
    #[arg(long, requires = "disparity")]
    pub slope_x: Option<f64>,
    /// Ramp slope per row.
    #[arg(long, requires = "disparity")]
    pub slope_y: Option<f64>,
    #[arg(long)]
    pub fx: Option<f64>,
    #[arg(long)]
    pub baseline: Option<f64>,
    #[arg(long)]
    pub bit_depth: Option<u8>,
    #[arg(long)]
    pub dot_density: Option<f64>,
    #[arg(long)]
    pub dot_radius: Option<f64>,
    #[arg(long)]
    pub contrast: Option<f64>,
    #[arg(long)]
    pub background: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub full_well: Option<f64>,
    #[arg(long)]
    pub read_sigma: Option<f64>,
    #[arg(long)]
    pub blur_sigma: Option<f64>,
    #[arg(long)]
    pub no_photon: bool,
    #[arg(long)]
    pub no_read: bool,
    #[arg(long)]
    pub no_blur: bool,
}

#[derive(Debug, Subcommand)]
pub enum PredictCommand {
    /// Planar stereo bias at disparity d.
    Bias {
        #[arg(long)]
        d: f64,
    },
    /// Depth RMS at distance z.
    Depth {
        #[arg(long)]
        z: f64,
        #[arg(long, default_value_t = DEFAULT_DISPARITY_RMS)]
        eps_d: f64,
        /// fx * B in meter-pixels; defaults to the configured rig.
        #[arg(long)]
        fb: Option<f64>,
    },
    /// Range for a given albedo and viewing geometry.
    Range {
        #[arg(long)]
        r95: f64,
        #[arg(long, default_value_t = 1.0)]
        albedo: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_target: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_fov: f64,
    },
    /// Range at another frame rate.
    Framerate {
        #[arg(long)]
        r95_ref: f64,
        #[arg(long)]
        fps_ref: f64,
        #[arg(long)]
        fps: f64,
    },
    /// Nearest and farthest reportable depth of the rig.
    Limits {
        #[arg(long)]
        fx: Option<f64>,
        #[arg(long)]
        baseline: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct PostprocArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `.pgm` stores 1/32 px codes, anything else PFM pixels.
    #[arg(long)]
    pub output: PathBuf,
    /// Remove components smaller than this many pixels (repeatable).
    #[arg(long, value_name = "MIN_SIZE", action = clap::ArgAction::Append)]
    pub speckle: Vec<usize>,
    /// Disparity tolerance inside a speckle component, pixels.
    #[arg(long)]
    pub speckle_tol: Option<f64>,
    /// Median window size, odd (repeatable).
    #[arg(long, value_name = "K", action = clap::ArgAction::Append)]
    pub median: Vec<usize>,
    /// Quantization step in pixels, a multiple of 1/32 (repeatable).
    #[arg(long, value_name = "EPS", action = clap::ArgAction::Append)]
    pub quantize: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "filter", rename_all = "snake_case")]
pub enum FilterStep {
    Speckle {
        max_region_size: usize,
        similarity_tol: f64,
    },
    Median {
        k: usize,
    },
    Quantize {
        eps_q: f64,
    },
}

/// Filters in the order their flags appeared on the command line.
pub fn ordered_filters(m: &ArgMatches, speckle_tol: f64) -> Vec<FilterStep> {
    fn collect<T: Clone + Send + Sync + 'static>(
        m: &ArgMatches,
        id: &str,
        f: impl Fn(T) -> FilterStep,
    ) -> Vec<(usize, FilterStep)> {
        match (m.indices_of(id), m.get_many::<T>(id)) {
            (Some(idx), Some(vals)) => idx.zip(vals.cloned().map(f)).collect(),
            _ => Vec::new(),
        }
    }
    let mut steps = collect(m, "speckle", |max_region_size| FilterStep::Speckle {
        max_region_size,
        similarity_tol: speckle_tol,
    });
    steps.extend(collect(m, "median", |k| FilterStep::Median { k }));
    steps.extend(collect(m, "quantize", |eps_q| FilterStep::Quantize {
        eps_q,
    }));
    steps.sort_by_key(|&(i, _)| i);
    steps.into_iter().map(|(_, s)| s).collect()
}

/// Files staged by a subcommand, written only once it has fully succeeded.
#[derive(Default)]
struct Outputs(Vec<(PathBuf, Vec<u8>)>);

impl Outputs {
    fn add(&mut self, path: &Path, bytes: Vec<u8>) {
        self.0.push((path.to_path_buf(), bytes));
    }

    fn commit(self) -> Result<()> {
        let mut written = Vec::new();
        for (path, bytes) in &self.0 {
            if let Err(e) = write_file_atomic(path, bytes) {
                for p in written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e.into());
            }
            written.push(path.clone());
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn encode_disparity(path: &Path, map: &DisparityMap) -> Vec<u8> {
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        write_pgm(&disparity_to_pgm(map))
    } else {
        write_pfm(&map.to_float())
    }
}

#[derive(Debug, Serialize)]
struct MatchReport {
    width: usize,
    height: usize,
    preset: PresetName,
    in_range_pixels: usize,
    valid_pixels: usize,
    validity: f64,
    thresholds: Thresholds,
}

fn cmd_match(a: &MatchArgs, cfg: &RunConfig, out: &mut Outputs) -> Result<String> {
    let left = load_pgm(&a.left, None)?;
    let right = load_pgm(&a.right, None)?;
    let (preset, thresholds) = cfg.thresholds(a.preset)?;
    let res = match_images_detailed(&left, &right, &thresholds)?;
    let (w, h) = (left.width(), left.height());
    let valid = res.disparity.valid_count();
    let report = MatchReport {
        width: w,
        height: h,
        preset,
        in_range_pixels: res.wta.disparity().valid_count(),
        valid_pixels: valid,
        validity: valid as f64 / (w * h) as f64,
        thresholds,
    };
    let text = to_json(&report)?;
    out.add(&a.out, encode_disparity(&a.out, &res.disparity));
    if let Some(p) = &a.report {
        out.add(p, text.clone().into_bytes());
    }
    Ok(text)
}

fn cmd_eval(a: &EvalArgs, out: &mut Outputs) -> Result<String> {
    let pred = load_disparity(&a.pred)?;
    let gt = load_pfm(&a.gt)?;
    let mask = match &a.mask {
        Some(p) => {
            let img = load_pgm(p, None)?;
            let bits = img.samples().iter().map(|&v| v != 0).collect();
            Some(ValidityMask::new(img.width(), img.height(), bits)?)
        }
        None => None,
    };
    let report: MetricsReport = compute_metrics(&pred, &gt, mask.as_ref())?;
    let text = to_json(&report)?;
    if let Some(p) = &a.report {
        out.add(p, text.clone().into_bytes());
    }
    Ok(text)
}

fn cmd_synth(a: &SynthArgs, cfg: &RunConfig, seed: u64, out: &mut Outputs) -> Result<String> {
    let sc = cfg.scene.clone().unwrap_or_default();
    let width = a.width.unwrap_or(sc.width);
    let height = a.height.unwrap_or(sc.height);
    let plane = match (a.z0, a.disparity) {
        (Some(z0), _) => PlaneGeometry::FrontoParallel { z0 },
        (None, Some(d)) => PlaneGeometry::Ramp {
            a: d,
            b: a.slope_x.unwrap_or(0.0),
            c: a.slope_y.unwrap_or(0.0),
        },
        (None, None) => sc.plane,
    };
    let mut texture = sc.texture;
    texture.density = a.dot_density.unwrap_or(texture.density);
    texture.radius = a.dot_radius.unwrap_or(texture.radius);
    texture.contrast = a.contrast.unwrap_or(texture.contrast);
    texture.background = a.background.unwrap_or(texture.background);
    let bit_depth = BitDepth::from_bits(a.bit_depth.unwrap_or(sc.bit_depth))?;
    let scene = PlaneScene {
        rig: cfg.rig(a.fx, a.baseline, width, height)?,
        width,
        height,
        plane,
        texture,
        bit_depth,
        seed,
    };
    let pair = render_plane_pair(&scene)?;
    let (lo, hi) = pair
        .gt
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| {
            (lo.min(d), hi.max(d))
        });
    out.add(&a.out_left, write_pgm(&pair.left));
    out.add(&a.out_right, write_pgm(&pair.right));
    out.add(&a.out_gt, write_pfm(&pair.gt));
    to_json(&json!({
        "width": width,
        "height": height,
        "bit_depth": bit_depth.bits(),
        "seed": seed,
        "plane": plane,
        "texture": texture,
        "rig": scene.rig,
        "gt_min": lo,
        "gt_max": hi,
        "exceeds_search_range": pair.exceeds_search_range,
    }))
}

fn cmd_noise(
    a: &NoiseArgs,
    cfg: &RunConfig,
    seed: Option<u64>,
    out: &mut Outputs,
) -> Result<String> {
    let img = load_pgm(&a.input, None)?;
    let mut p = cfg.noise.unwrap_or_default();
    if let Some(s) = seed {
        p.seed = s;
    }
    p.full_well = a.full_well.unwrap_or(p.full_well);
    p.read_sigma = a.read_sigma.unwrap_or(p.read_sigma);
    p.blur_sigma = a.blur_sigma.unwrap_or(p.blur_sigma);
    p.photon &= !a.no_photon;
    p.read &= !a.no_read;
    p.blur &= !a.no_blur;
    let noisy = add_sensor_noise(&img, &p)?;
    out.add(&a.output, write_pgm(&noisy));
    to_json(&json!({
        "width": img.width(),
        "height": img.height(),
        "bit_depth": img.bit_depth().bits(),
        "params": p,
    }))
}

fn predict(input: Value, output: Value, formula: &str) -> Result<String> {
    to_json(&json!({ "input": input, "output": output, "formula": formula }))
}

fn cmd_predict(c: &PredictCommand, cfg: &RunConfig) -> Result<String> {
    match *c {
        PredictCommand::Bias { d } => predict(
            json!({ "d": d }),
            json!({ "bias": planar_bias(d)? }),
            "bias = -d / (2 d^2 - 1)",
        ),
        PredictCommand::Depth { z, eps_d, fb } => {
            let fb = match fb {
                Some(v) => v,
                None => cfg.rig(None, None, 2, 2)?.focal_baseline(),
            };
            let e = depth_rms(z, &ErrorModel::new(eps_d, fb)?)?;
            predict(
                json!({ "z": z, "eps_d": eps_d, "fb": fb }),
                json!({ "eps_m": e.eps_m, "eps_frac": e.eps_frac }),
                "eps_m = z^2 eps_d / (f B); eps_frac = eps_d z / (f B)",
            )
        }
        PredictCommand::Range {
            r95,
            albedo,
            theta_target,
            theta_fov,
        } => {
            let s = RangeScenario {
                r95,
                albedo,
                theta_target_deg: theta_target,
                theta_fov_deg: theta_fov,
            };
            predict(
                json!({ "r95": r95, "albedo": albedo, "theta_target": theta_target, "theta_fov": theta_fov }),
                json!({ "range": expected_range(&s)? }),
                "r = r95 sqrt(cos(theta_target) albedo cos(theta_fov)^7)",
            )
        }
        PredictCommand::Framerate {
            r95_ref,
            fps_ref,
            fps,
        } => predict(
            json!({ "r95_ref": r95_ref, "fps_ref": fps_ref, "fps": fps }),
            json!({ "range": framerate_range_scale(r95_ref, fps_ref, fps)? }),
            "r = r95_ref sqrt(fps_ref / fps)",
        ),
        PredictCommand::Limits { fx, baseline } => {
            let rig: StereoRig = cfg.rig(fx, baseline, 2, 2)?;
            let (z_min, z_max) = operating_range(&rig);
            predict(
                json!({ "fx": rig.intrinsics.fx, "baseline": rig.baseline }),
                json!({ "z_min": z_min, "z_max": z_max }),
                "z_min = f B / (63 + 31/32); z_max = f B / (1/32)",
            )
        }
    }
}

fn cmd_postproc(
    a: &PostprocArgs,
    m: &ArgMatches,
    cfg: &RunConfig,
    out: &mut Outputs,
) -> Result<String> {
    let defaults = cfg.speckle.unwrap_or_default();
    let tol = a.speckle_tol.unwrap_or(defaults.similarity_tol);
    let steps = ordered_filters(m, tol);
    let mut map = load_disparity(&a.input)?;
    let mut log = Vec::new();
    for step in &steps {
        let before = map.valid_count();
        map = match *step {
            FilterStep::Speckle {
                max_region_size,
                similarity_tol,
            } => speckle_filter(
                &map,
                &SpeckleParams {
                    max_region_size,
                    similarity_tol,
                },
            )?,
            FilterStep::Median { k } => median_filter(&map, k)?,
            FilterStep::Quantize { eps_q } => quantize_disparity(&map, eps_q)?,
        };
        log.push(json!({ "step": step, "valid_before": before, "valid_after": map.valid_count() }));
    }
    out.add(&a.output, encode_disparity(&a.output, &map));
    to_json(&json!({
        "width": map.width(),
        "height": map.height(),
        "steps": log,
        "valid_pixels": map.valid_count(),
    }))
}

fn execute(cli: &Cli, matches: &ArgMatches) -> Result<String> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let seed = cfg.seed(cli.seed);
    let mut out = Outputs::default();
    let mut body = || -> Result<String> {
        match &cli.command {
            Command::Match(a) => cmd_match(a, &cfg, &mut out),
            Command::Eval(a) => cmd_eval(a, &mut out),
            Command::Synth(a) => cmd_synth(a, &cfg, seed.unwrap_or(0), &mut out),
            Command::Noise(a) => cmd_noise(a, &cfg, seed, &mut out),
            Command::Predict(c) => cmd_predict(c, &cfg),
            Command::Postproc(a) => {
                let m = matches
                    .subcommand_matches("postproc")
                    .context("postproc matches")?;
                cmd_postproc(a, m, &cfg, &mut out)
            }
        }
    };
    let text = match cli.threads.or(cfg.threads) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(ensure_positive_threads(n)?)
            .build()?
            .install(body)?,
        None => body()?,
    };
    out.commit()?;
    Ok(text)
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = Cli::from_arg_matches(&matches)
        .map_err(anyhow::Error::from)
        .and_then(|cli| execute(&cli, &matches));
    match result {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return 1;
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
