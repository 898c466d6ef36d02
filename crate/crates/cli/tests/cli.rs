//! End-to-end tests of the command-line binary: every subcommand, the exit
//! code contract, and the on-disk formats.

use ptroad::pngio;
use ptroad_core::{read_pt7, CropAboveHorizon, RoadModelRecord};
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ptroad"))
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = bin();
    for a in args {
        cmd.arg(a.as_ref());
    }
    cmd.output().expect("failed to spawn the binary")
}

macro_rules! ptroad {
    ($($arg:expr),+ $(,)?) => {{
        run(&[$(&$arg),+])
    }};
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Writes a 16-bit disparity PNG from (raw sample) rows.
fn write_disparity_raw(path: &Path, width: usize, rows: &[Vec<u16>]) {
    let mut values = Vec::new();
    let mut valid = Vec::new();
    for row in rows {
        assert_eq!(row.len(), width);
        for &r in row {
            values.push(r as f32 / 256.0);
            valid.push(r != 0);
        }
    }
    let disp =
        ptroad_core::DisparityMap::new(width, rows.len(), values, valid).unwrap();
    std::fs::write(path, pngio::disparity_to_png16(&disp).unwrap()).unwrap();
}

fn write_gray8(path: &Path, width: usize, height: usize, samples: &[u8]) {
    let img = ptroad_core::Image::new(
        width,
        height,
        1,
        samples.iter().map(|&b| b as f32 / 255.0).collect(),
    )
    .unwrap();
    std::fs::write(path, pngio::image_to_png(&img).unwrap()).unwrap();
}

fn synth_scene(dir: &Path, seed: u64, stem: Option<&str>) {
    let mut args: Vec<String> = vec![
        "synth".into(),
        dir.display().to_string(),
        "--seed".into(),
        seed.to_string(),
    ];
    if let Some(s) = stem {
        args.push("--stem".into());
        args.push(s.into());
    }
    let out = run(&args.iter().map(|s| s as &dyn AsRef<std::ffi::OsStr>).collect::<Vec<_>>());
    assert_exit(&out, 0);
}

#[test]
fn all_zero_disparity_yields_all_zero_csv() {
    let dir = tempfile::tempdir().unwrap();
    let disp = dir.path().join("disp.png");
    write_disparity_raw(&disp, 4, &[vec![0; 4], vec![0; 4], vec![0; 4]]);
    let csv = dir.path().join("vd.csv");
    let png = dir.path().join("vd.png");
    let out = ptroad!("vdisp", disp, csv, png);
    assert_exit(&out, 0);
    assert_eq!(std::fs::read_to_string(csv).unwrap(), "0\n0\n0\n");
    let rendering = pngio::image_from_png(&std::fs::read(png).unwrap()).unwrap();
    assert!(rendering.samples().iter().all(|&s| s == 0.0));
}

#[test]
fn vdisp_row_sums_recount_valid_pixels() {
    let dir = tempfile::tempdir().unwrap();
    let disp = dir.path().join("disp.png");
    // Raw samples under the x256 convention: row 0 has 3 valid pixels, row 1
    // has 1, row 2 none.
    write_disparity_raw(
        &disp,
        4,
        &[vec![256, 256, 512, 0], vec![0, 768, 0, 0], vec![0, 0, 0, 0]],
    );
    let csv = dir.path().join("vd.csv");
    let png = dir.path().join("vd.png");
    let out = ptroad!("vdisp", disp, csv, png, "--normalize", "false");
    assert_exit(&out, 0);
    let text = std::fs::read_to_string(csv).unwrap();
    let sums: Vec<f64> = text
        .lines()
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).sum())
        .collect();
    assert_eq!(sums, vec![3.0, 1.0, 0.0]);
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptroad!(
        "vdisp",
        dir.path().join("absent.png"),
        dir.path().join("a.csv"),
        dir.path().join("a.png")
    );
    assert_exit(&out, 2);
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn unknown_flag_exits_2() {
    let out = ptroad!("netshape", "--height", "64", "--width", "64", "--bogus");
    assert_exit(&out, 2);
}

#[test]
fn help_exits_0_and_documents_exit_codes() {
    let out = ptroad!("--help");
    assert_exit(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Exit codes"));
}

#[test]
fn fit_recovers_the_synthetic_model() {
    let dir = tempfile::tempdir().unwrap();
    synth_scene(dir.path(), 3, None);
    let model_path = dir.path().join("fit.json");
    let out = ptroad!("fit", dir.path().join("disp.png"), model_path);
    assert_exit(&out, 0);
    let rec: RoadModelRecord =
        serde_json::from_slice(&std::fs::read(&model_path).unwrap()).unwrap();
    assert!((rec.alpha1 - 0.25).abs() <= 0.005, "alpha1 = {}", rec.alpha1);
    assert!((rec.alpha0 + 20.0).abs() <= 1.0, "alpha0 = {}", rec.alpha0);
    assert!((rec.v_py as i64 - 80).abs() <= 2, "v_py = {}", rec.v_py);
    assert_eq!(rec.lambda, 0.02);
    assert_eq!(rec.tau_max, 12);
    assert_eq!(rec.smoothness_sign, 1);
}

#[test]
fn constant_disparity_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let disp = dir.path().join("disp.png");
    write_disparity_raw(&disp, 8, &vec![vec![1280; 8]; 20]);
    let out = ptroad!("fit", disp, dir.path().join("m.json"));
    assert_exit(&out, 3);
}

#[test]
fn negative_lambda_in_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"lambda": -0.5}"#).unwrap();
    synth_scene(dir.path(), 4, None);
    let out = ptroad!("fit", dir.path().join("disp.png"), dir.path().join("m.json"),
        "--config", cfg);
    assert_exit(&out, 2);
}

#[test]
fn pipeline_packs_the_cropped_disparity_plane() {
    let dir = tempfile::tempdir().unwrap();
    synth_scene(dir.path(), 5, None);
    let out_dir = dir.path().join("out");
    let out = ptroad!(
        "pipeline",
        dir.path().join("left.png"),
        dir.path().join("right.png"),
        dir.path().join("disp.png"),
        out_dir
    );
    assert_exit(&out, 0);

    let bytes = std::fs::read(out_dir.join("frame.pt7")).unwrap();
    let (tensor, model) = read_pt7(&bytes).unwrap();
    let rec: RoadModelRecord =
        serde_json::from_slice(&std::fs::read(out_dir.join("model.json")).unwrap()).unwrap();
    assert_eq!(rec.model(), model);

    let disp = pngio::disparity_from_png16(
        &std::fs::read(dir.path().join("disp.png")).unwrap(),
    )
    .unwrap();
    let cropped = disp.crop_above_horizon(model.v_py).unwrap();
    assert_eq!(tensor.plane(6), cropped.values());
    assert_eq!(tensor.height(), 375 - model.v_py);

    for name in ["left_crop.png", "right_warp.png", "valid.png"] {
        assert!(out_dir.join(name).is_file(), "{name} missing");
    }
    let left_crop =
        pngio::image_from_png(&std::fs::read(out_dir.join("left_crop.png")).unwrap()).unwrap();
    assert_eq!(left_crop.height(), 375 - model.v_py);
}

#[test]
fn pipeline_rejects_mismatched_frame_sizes() {
    let dir = tempfile::tempdir().unwrap();
    synth_scene(dir.path(), 6, None);
    let small = dir.path().join("small");
    let out = ptroad!("synth", small, "--width", "640", "--height", "192",
        "--alpha0", "-12", "--alpha1", "0.3");
    assert_exit(&out, 0);
    let out = ptroad!(
        "pipeline",
        dir.path().join("left.png"),
        small.join("right.png"),
        dir.path().join("disp.png"),
        dir.path().join("out")
    );
    assert_exit(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage load"));
}

#[test]
fn batch_pipeline_processes_stem_triples() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    synth_scene(&frames, 7, Some("a"));
    synth_scene(&frames, 8, Some("b"));
    // A stray left image without its partners is skipped with a warning.
    write_gray8(&frames.join("c_left.png"), 2, 2, &[0, 64, 128, 255]);
    let out_dir = dir.path().join("out");
    let out = ptroad!("pipeline", frames, out_dir);
    assert_exit(&out, 0);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("skipping c"), "stderr: {stderr}");
    for name in ["a.pt7", "b.pt7", "a_model.json", "b_valid.png"] {
        assert!(out_dir.join(name).is_file(), "{name} missing");
    }
    let (tensor, _) = read_pt7(&std::fs::read(out_dir.join("a.pt7")).unwrap()).unwrap();
    assert_eq!(tensor.width(), 1242);
}

#[test]
fn transform_aligns_right_to_left_on_the_road() {
    let dir = tempfile::tempdir().unwrap();
    synth_scene(dir.path(), 9, None);
    let out_img = dir.path().join("warp.png");
    let out_valid = dir.path().join("warp_valid.png");
    let out = ptroad!(
        "transform",
        dir.path().join("right.png"),
        dir.path().join("model.json"),
        out_img,
        out_valid
    );
    assert_exit(&out, 0);

    let left =
        pngio::image_from_png(&std::fs::read(dir.path().join("left.png")).unwrap()).unwrap();
    let warped = pngio::image_from_png(&std::fs::read(&out_img).unwrap()).unwrap();
    let valid = pngio::mask_from_png(&std::fs::read(&out_valid).unwrap()).unwrap();
    let road =
        pngio::mask_from_png(&std::fs::read(dir.path().join("road_mask.png")).unwrap()).unwrap();
    let mut sum = 0.0f64;
    let mut n = 0u64;
    for v in 0..left.height() {
        for u in 0..left.width() {
            if road.get(u, v) && valid.get(u, v) {
                sum += (warped.sample(u, v, 0) - left.sample(u, v, 0)).abs() as f64;
                n += 1;
            }
        }
    }
    assert!(n > 100_000, "road sample too small: {n}");
    let mad = sum / n as f64;
    // 8-bit quantization alone contributes up to ~0.004 of absolute error.
    assert!(mad < 0.03, "MAD {mad}");
}

#[test]
fn eval_perfect_prediction_reports_maxf_1() {
    let dir = tempfile::tempdir().unwrap();
    let prob = dir.path().join("prob.png");
    let gt = dir.path().join("gt.png");
    // Top half road (white), bottom half not.
    let mut samples = vec![255u8; 32];
    samples.extend(vec![0u8; 32]);
    write_gray8(&prob, 8, 8, &samples);
    write_gray8(&gt, 8, 8, &samples);
    let report_path = dir.path().join("report.json");
    let curve_path = dir.path().join("curve.csv");
    let mask_path = dir.path().join("mask.png");
    let out = ptroad!("eval", prob, gt, report_path,
        "--curve", curve_path, "--mask-out", mask_path);
    assert_exit(&out, 0);

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report_path).unwrap()).unwrap();
    assert_eq!(report["maxf"], 1.0);
    assert_eq!(report["ap"], 1.0);
    assert_eq!(report["fnr"], 0.0);
    assert_eq!(report["n_thresholds"], 256);
    assert_eq!(report["ap_points"], 101);

    let curve = std::fs::read_to_string(&curve_path).unwrap();
    assert!(curve.starts_with("threshold,pre,rec,f1\n"));
    assert_eq!(curve.lines().count(), 257);

    // The mask at the default 0.9 threshold reproduces the ground truth.
    let mask = pngio::mask_from_png(&std::fs::read(&mask_path).unwrap()).unwrap();
    let expected: Vec<bool> = samples.iter().map(|&s| s > 127).collect();
    assert_eq!(mask.entries(), &expected[..]);
}

#[test]
fn eval_all_false_ground_truth_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let prob = dir.path().join("prob.png");
    let gt = dir.path().join("gt.png");
    write_gray8(&prob, 4, 4, &[128; 16]);
    write_gray8(&gt, 4, 4, &[0; 16]);
    let out = ptroad!("eval", prob, gt, dir.path().join("report.json"));
    assert_exit(&out, 5);
}

#[test]
fn eval_accepts_color_coded_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let prob = dir.path().join("prob.png");
    let gt = dir.path().join("gt.png");
    // 2x2: road (magenta), background-but-valid (red), two invalid (black).
    write_gray8(&prob, 2, 2, &[255, 0, 200, 10]);
    let gt_img = ptroad_core::Image::new(
        2,
        2,
        3,
        vec![
            1.0, 0.0, 1.0, // road
            1.0, 0.0, 0.0, // valid, not road
            0.0, 0.0, 0.0, // invalid
            0.0, 0.0, 0.0, // invalid
        ],
    )
    .unwrap();
    std::fs::write(&gt, pngio::image_to_png(&gt_img).unwrap()).unwrap();
    let report_path = dir.path().join("report.json");
    let out = ptroad!("eval", prob, gt, report_path);
    assert_exit(&out, 0);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report_path).unwrap()).unwrap();
    // Only two pixels are valid and the prediction is perfect on them.
    assert_eq!(report["maxf"], 1.0);
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    for (path, seed) in [(&a, 7u64), (&b, 7), (&c, 8)] {
        let out = ptroad!("synth", path, "--seed", seed.to_string(),
            "--width", "320", "--height", "96", "--alpha0", "-6", "--alpha1", "0.3",
            "--noise", "0.01",
            "--obstacle", "100,40,60,30,16");
        assert_exit(&out, 0);
    }
    for name in ["left.png", "right.png", "disp.png", "road_mask.png", "model.json"] {
        let bytes_a = std::fs::read(a.join(name)).unwrap();
        assert_eq!(bytes_a, std::fs::read(b.join(name)).unwrap(), "{name} differs across runs");
        if name == "left.png" {
            assert_ne!(
                bytes_a,
                std::fs::read(c.join(name)).unwrap(),
                "different seeds must differ"
            );
        }
    }
}

#[test]
fn synth_rejects_impossible_geometry() {
    let dir = tempfile::tempdir().unwrap();
    // Obstacle disparity below the road at its contact row.
    let out = ptroad!("synth", dir.path().join("s"), "--obstacle", "100,100,50,50,1");
    assert_exit(&out, 2);
}

#[test]
fn netshape_traces_the_64x64_grid() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("trace.json");
    let out = ptroad!("netshape", "--height", "64", "--width", "64", "--json", json_path);
    assert_exit(&out, 0);
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("block4"), "table: {table}");
    assert!(table.contains("probability"));
    let trace: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&json_path).unwrap()).unwrap();
    let stages = trace["stages"].as_array().unwrap();
    let block4 = stages.iter().find(|s| s["name"] == "block4").unwrap();
    assert_eq!(block4["height"], 4);
    assert_eq!(block4["width"], 4);
    let last = stages.last().unwrap();
    assert_eq!(last["name"], "probability");
    assert_eq!(last["height"], 64);
    assert_eq!(last["width"], 64);
    assert_eq!(last["channels"], 1);
}
