//! End-to-end runs of the `census-stereo` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_census-stereo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn census-stereo")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn check_schema(name: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{name}.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(
        errors.is_empty(),
        "{name} output violates schema: {errors:?}\n{doc:#}"
    );
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn synth(&self, extra: &[&str]) -> Value {
        let (l, r, g) = (self.p("l.pgm"), self.p("r.pgm"), self.p("gt.pfm"));
        let mut args = vec![
            "synth",
            "--out-left",
            &l,
            "--out-right",
            &r,
            "--out-gt",
            &g,
            "--width",
            "96",
            "--height",
            "64",
            "--disparity",
            "12.5",
        ];
        args.extend_from_slice(extra);
        ok_json(&args)
    }

    fn files(&self) -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(self.dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names
    }
}

#[test]
fn synth_match_eval_pipeline() {
    let w = Work::new();
    let synth = w.synth(&["--seed", "5"]);
    check_schema("synth", &synth);
    assert_eq!(synth["gt_min"], 12.5);
    assert_eq!(synth["exceeds_search_range"], false);

    let (l, r, d, rep) = (w.p("l.pgm"), w.p("r.pgm"), w.p("d.pfm"), w.p("match.json"));
    let m = ok_json(&[
        "match", "--left", &l, "--right", &r, "--preset", "medium", "--out", &d, "--report", &rep,
    ]);
    check_schema("match", &m);
    assert_eq!(m["preset"], "medium");
    let saved: Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
    assert_eq!(saved, m);

    let gt = w.p("gt.pfm");
    let e = ok_json(&["eval", "--pred", &d, "--gt", &gt]);
    check_schema("eval", &e);
    assert!(e["bad10"].as_f64().unwrap() < 0.05, "{e}");
    assert!(e["validity"].as_f64().unwrap() > 0.3, "{e}");
}

#[test]
fn pgm_output_round_trips_through_eval() {
    let w = Work::new();
    w.synth(&[]);
    let (l, r, d) = (w.p("l.pgm"), w.p("r.pgm"), w.p("d.pgm"));
    ok_json(&["match", "--left", &l, "--right", &r, "--out", &d]);
    let bytes = std::fs::read(&d).unwrap();
    assert!(bytes.starts_with(b"P5\n96 64\n65535\n"));
    // A map scored against itself is exact wherever it is valid.
    let pfm = w.p("d.pfm");
    ok_json(&["postproc", "--input", &d, "--output", &pfm]);
    let e = ok_json(&["eval", "--pred", &d, "--gt", &pfm]);
    assert_eq!(e["bad05"], 0.0);
    assert_eq!(e["avg_err"], 0.0);
    assert_eq!(e["validity"], 1.0);
}

#[test]
fn eval_mask_restricts_pixels() {
    let w = Work::new();
    w.synth(&[]);
    let (l, r, d, gt) = (w.p("l.pgm"), w.p("r.pgm"), w.p("d.pfm"), w.p("gt.pfm"));
    ok_json(&["match", "--left", &l, "--right", &r, "--out", &d]);
    // Only the top-left 10x10 block.
    let mut mask = b"P5\n96 64\n255\n".to_vec();
    mask.extend((0..96 * 64).map(|i| if i % 96 < 10 && i / 96 < 10 { 255u8 } else { 0 }));
    std::fs::write(w.path("mask.pgm"), mask).unwrap();
    let m = w.p("mask.pgm");
    let e = ok_json(&["eval", "--pred", &d, "--gt", &gt, "--mask", &m]);
    assert_eq!(e["evaluated_pixels"], 100);
}

#[test]
fn noise_is_seeded() {
    let w = Work::new();
    w.synth(&[]);
    let l = w.p("l.pgm");
    let (a, b, c) = (w.p("a.pgm"), w.p("b.pgm"), w.p("c.pgm"));
    let n = ok_json(&["noise", "--input", &l, "--output", &a, "--seed", "9"]);
    check_schema("noise", &n);
    assert_eq!(n["params"]["seed"], 9);
    ok_json(&["noise", "--input", &l, "--output", &b, "--seed", "9"]);
    ok_json(&["noise", "--input", &l, "--output", &c, "--seed", "10"]);
    let read = |p: &str| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));

    let off = w.p("off.pgm");
    ok_json(&[
        "noise",
        "--input",
        &l,
        "--output",
        &off,
        "--no-photon",
        "--no-read",
        "--no-blur",
    ]);
    assert_eq!(read(&off), read(&l));
}

#[test]
fn predict_values() {
    let bias = ok_json(&["predict", "bias", "--d", "2"]);
    check_schema("predict", &bias);
    assert_eq!(bias["output"]["bias"].as_f64().unwrap(), -2.0 / 7.0);

    let depth = ok_json(&[
        "predict", "depth", "--z", "1", "--eps-d", "0.08", "--fb", "38.1",
    ]);
    check_schema("predict", &depth);
    assert!((depth["output"]["eps_m"].as_f64().unwrap() - 0.08 / 38.1).abs() < 1e-15);

    let range = ok_json(&[
        "predict",
        "range",
        "--r95",
        "6",
        "--albedo",
        "0.2",
        "--theta-target",
        "60",
        "--theta-fov",
        "15",
    ]);
    check_schema("predict", &range);
    assert!((range["output"]["range"].as_f64().unwrap() - 1.68).abs() < 0.01);

    let fr = ok_json(&[
        "predict",
        "framerate",
        "--r95-ref",
        "6",
        "--fps-ref",
        "30",
        "--fps",
        "90",
    ]);
    check_schema("predict", &fr);
    assert!((fr["output"]["range"].as_f64().unwrap() - 6.0 / 3f64.sqrt()).abs() < 1e-12);

    let lim = ok_json(&["predict", "limits", "--fx", "477", "--baseline", "0.07"]);
    check_schema("predict", &lim);
    let z_min = lim["output"]["z_min"].as_f64().unwrap();
    assert!((z_min - 0.522).abs() < 1e-3);
}

#[test]
fn predict_rejects_out_of_domain() {
    for args in [
        &["predict", "bias", "--d", "0.5"][..],
        &["predict", "depth", "--z=-1"],
        &["predict", "range", "--r95", "6", "--albedo", "1.5"],
        &[
            "predict",
            "framerate",
            "--r95-ref",
            "6",
            "--fps-ref",
            "30",
            "--fps",
            "0",
        ],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn postproc_applies_filters_in_flag_order() {
    let w = Work::new();
    w.synth(&[]);
    ok_json(&[
        "noise",
        "--input",
        &w.p("r.pgm"),
        "--output",
        &w.p("rn.pgm"),
        "--read-sigma",
        "8",
    ]);
    let (l, r, d) = (w.p("l.pgm"), w.p("rn.pgm"), w.p("d.pfm"));
    ok_json(&["match", "--left", &l, "--right", &r, "--out", &d]);
    let out = w.p("p.pgm");
    let doc = ok_json(&[
        "postproc",
        "--input",
        &d,
        "--output",
        &out,
        "--quantize",
        "0.25",
        "--speckle",
        "30",
        "--median",
        "3",
    ]);
    check_schema("postproc", &doc);
    let steps = doc["steps"].as_array().unwrap();
    let names: Vec<&str> = steps
        .iter()
        .map(|s| s["step"]["filter"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["quantize", "speckle", "median"]);
    for pair in steps.windows(2) {
        assert_eq!(pair[0]["valid_after"], pair[1]["valid_before"]);
    }
    for s in steps {
        assert!(s["valid_after"].as_u64() <= s["valid_before"].as_u64());
    }
}

#[test]
fn bad_input_fails_without_outputs() {
    let w = Work::new();
    w.synth(&[]);
    let l = w.p("l.pgm");
    // Size mismatch is detected only after the larger image is read.
    let small = w.p("small.pgm");
    let mut bytes = b"P5\n8 8\n255\n".to_vec();
    bytes.extend([0u8; 64]);
    std::fs::write(&small, bytes).unwrap();
    let before = w.files();
    let (d, rep) = (w.p("d.pfm"), w.p("rep.json"));
    let out = run(&[
        "match", "--left", &l, "--right", &small, "--out", &d, "--report", &rep,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert_eq!(w.files(), before);

    // An invalid filter late in the chain must not leave the output behind.
    let out = run(&[
        "postproc",
        "--input",
        &w.p("gt.pfm"),
        "--output",
        &w.p("p.pfm"),
        "--median",
        "3",
        "--median",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(w.files(), before);

    let garbage = w.p("garbage.pgm");
    std::fs::write(&garbage, b"P6\n1 1\n255\n\0\0\0").unwrap();
    let out = run(&["noise", "--input", &garbage, "--output", &w.p("x.pgm")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at byte 0"));
    assert!(!w.path("x.pgm").exists());
}

#[test]
fn bad_flags_are_usage_errors() {
    let cases: [&[&str]; 5] = [
        &["match", "--left", "a.pgm"],
        &["predict", "bias"],
        &["predict", "bias", "--d", "two"],
        &["synth", "--bogus"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let zero = run(&["--threads", "0", "predict", "bias", "--d", "2"]);
    assert_eq!(zero.status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_bytes() {
    let w = Work::new();
    w.synth(&["--seed", "3"]);
    let mut outputs = Vec::new();
    for threads in ["1", "2", "5"] {
        let (l, r) = (w.p("l.pgm"), w.p("r.pgm"));
        let n = w.p(&format!("n{threads}.pgm"));
        let d = w.p(&format!("d{threads}.pfm"));
        ok_json(&[
            "--threads",
            threads,
            "noise",
            "--input",
            &r,
            "--output",
            &n,
            "--seed",
            "1",
        ]);
        let report = run(&[
            "--threads",
            threads,
            "match",
            "--left",
            &l,
            "--right",
            &n,
            "--preset",
            "high",
            "--out",
            &d,
        ]);
        assert!(report.status.success());
        outputs.push((
            std::fs::read(&n).unwrap(),
            std::fs::read(&d).unwrap(),
            report.stdout,
        ));
    }
    assert!(outputs.windows(2).all(|p| p[0] == p[1]));
}

#[test]
fn config_merges_with_flags() {
    let w = Work::new();
    let cfg = w.path("run.json");
    std::fs::write(
        &cfg,
        r#"{
            "seed": 11,
            "preset": "high",
            "thresholds": { "lr_max": 7, "enabled": { "median": false } },
            "scene": { "width": 80, "height": 48, "plane": { "ramp": { "a": 9.0, "b": 0.0, "c": 0.0 } } }
        }"#,
    )
    .unwrap();
    let c = w.p("run.json");
    check_schema(
        "config",
        &serde_json::from_slice(&std::fs::read(&cfg).unwrap()).unwrap(),
    );
    let (l, r, g) = (w.p("l.pgm"), w.p("r.pgm"), w.p("gt.pfm"));
    let s = ok_json(&[
        "--config",
        &c,
        "synth",
        "--out-left",
        &l,
        "--out-right",
        &r,
        "--out-gt",
        &g,
    ]);
    assert_eq!(
        (
            s["width"].as_u64(),
            s["height"].as_u64(),
            s["seed"].as_u64()
        ),
        (Some(80), Some(48), Some(11))
    );
    assert_eq!(s["gt_max"], 9.0);
    let s = ok_json(&[
        "--config",
        &c,
        "--seed",
        "12",
        "synth",
        "--out-left",
        &l,
        "--out-right",
        &r,
        "--out-gt",
        &g,
        "--width",
        "72",
    ]);
    assert_eq!(
        (s["width"].as_u64(), s["seed"].as_u64()),
        (Some(72), Some(12))
    );

    let d = w.p("d.pfm");
    let m = ok_json(&[
        "--config", &c, "match", "--left", &l, "--right", &r, "--out", &d,
    ]);
    assert_eq!(m["preset"], "high");
    assert_eq!(m["thresholds"]["lr_max"], 7);
    assert_eq!(m["thresholds"]["enabled"]["median"], false);
    assert_eq!(m["thresholds"]["enabled"]["texture"], true);
    let m = ok_json(&[
        "--config", &c, "match", "--left", &l, "--right", &r, "--out", &d, "--preset", "low",
    ]);
    assert_eq!(m["preset"], "low");
    assert_eq!(m["thresholds"]["lr_max"], 7);
}

#[test]
fn config_rejects_unknown_keys() {
    let w = Work::new();
    w.synth(&[]);
    let (l, r, d) = (w.p("l.pgm"), w.p("r.pgm"), w.p("d.pfm"));
    for (i, (text, key)) in [
        (r#"{ "seeed": 1 }"#, "seeed"),
        (r#"{ "thresholds": { "lr_maxx": 3 } }"#, "lr_maxx"),
        (r#"{ "scene": { "widht": 10 } }"#, "widht"),
        (r#"{ "preset": "extreme" }"#, "extreme"),
    ]
    .iter()
    .enumerate()
    {
        let path = w.path(&format!("bad{i}.json"));
        std::fs::write(&path, text).unwrap();
        let p = path.to_string_lossy().into_owned();
        let out = run(&[
            "--config", &p, "match", "--left", &l, "--right", &r, "--out", &d,
        ]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).contains(key), "{text}");
        assert!(!w.path("d.pfm").exists());
    }
}
