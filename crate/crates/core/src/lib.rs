//! Census block-matching stereo in software.
//!
//! The pipeline mirrors a fixed-function depth processor: a 7x7 Census
//! transform, a 64-disparity Hamming cost volume with 7x7 box aggregation,
//! winner-take-all with 1/32-pixel subpixel refinement, and a bank of
//! interest operators that mask out weak matches. Around it sit the camera
//! and error models, a sensor-noise injector, a synthetic scene renderer,
//! Middlebury-style metrics and optional post-processing.
//!
//! | module | contents |
//! |---|---|
//! | [`pixel`] | images, fixed-point disparity maps, masks |
//! | [`matcher`] | Census, cost volume, WTA, right view |
//! | [`interest`] | confidence operators and presets |
//! | [`camera`] | intrinsics, distortion, depth conversion |
//! | [`perf_model`] | closed-form error and range models |
//! | [`noise`] | blur, photon and read noise |
//! | [`synth`] | random-dot plane scenes with exact ground truth |
//! | [`eval`] | metrics, plane fit, PGM/PFM |
//! | [`postproc`] | speckle, median, quantization |
//! | [`cli`] | the `census-stereo` command line |
//!
//! Each capability has a runnable program under `examples/`:
//!
//! ```text
//! cargo run --release --example match_pair
//! cargo run --release --example interest_presets
//! cargo run --release --example camera_geometry
//! cargo run --release --example performance_models
//! cargo run --release --example noise_injection
//! cargo run --release --example synth_scene
//! cargo run --release --example middlebury_eval
//! cargo run --release --example plane_fit_wall
//! cargo run --release --example postprocess
//! ```
//!
//! ```
//! use census_stereo::interest::{preset_thresholds, PresetName};
//! use census_stereo::matcher::match_images;
//! use census_stereo::synth::{render_plane_pair, PlaneScene};
//!
//! let scene = PlaneScene::constant_disparity(96, 64, 12.0);
//! let pair = render_plane_pair(&scene).unwrap();
//! let map = match_images(&pair.left, &pair.right, &preset_thresholds(PresetName::Off)).unwrap();
//! assert_eq!(map.integer_at(48, 32), Some(12));
//! ```

pub mod camera;
pub mod cli;

pub mod eval;
pub mod interest;
pub mod matcher;
pub mod noise;
pub mod perf_model;
pub mod pixel;
pub mod postproc;
pub mod rng;
pub mod synth;
