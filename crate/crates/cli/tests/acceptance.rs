//! Acceptance suite: one test per top-level requirement, each printing a
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines; the assertions hold either way.

use ptroad::pngio;
use ptroad_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn report(name: &str, detail: &str) {
    println!("PASS {name}: {detail}");
}

/// Exhaustive reference: minimum energy over every path the recurrence can
/// reach, enumerated recursively. A path picks one row per bin; stepping
/// from bin d to bin d+1 drops the row by some tau in [0, min(tau_max, row)]
/// and costs sign * lambda * tau, and each visited cell contributes minus
/// its mass.
fn exhaustive_min_energy(vd: &VDisparityMap, cfg: &DPConfig) -> f64 {
    fn go(vd: &VDisparityMap, cfg: &DPConfig, d: usize, row: usize, acc: f64, best: &mut f64) {
        let here = acc - vd.count(d, row);
        if d + 1 == vd.d_bins() {
            if here < *best {
                *best = here;
            }
            return;
        }
        for tau in 0..=cfg.tau_max.min(row) {
            let step = cfg.lambda * f64::from(cfg.smoothness_sign) * tau as f64;
            go(vd, cfg, d + 1, row - tau, here + step, best);
        }
    }
    let mut best = f64::INFINITY;
    for start in 0..vd.height() {
        go(vd, cfg, 0, start, 0.0, &mut best);
    }
    best
}

#[test]
fn criterion_1_profile_search_is_exactly_optimal() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..200 {
        let d_bins = rng.random_range(1..=6usize);
        let height = rng.random_range(1..=6usize);
        // The solver requires tau_max < height, so clamp rather than skip to
        // keep exactly 200 cases.
        let tau_max = rng.random_range(0..=2usize).min(height - 1);
        let width = 16;
        // Random normalized histogram: counts on the 1/width lattice.
        let mut disp_values = Vec::new();
        let mut valid = Vec::new();
        for _ in 0..height {
            for _ in 0..width {
                let d = rng.random_range(0..d_bins);
                let keep = rng.random_bool(0.7);
                disp_values.push(d as f32);
                valid.push(keep);
            }
        }
        let disp = DisparityMap::new(width, height, disp_values, valid).unwrap();
        let vd = build_vdisparity(&disp, Some(d_bins - 1), true).unwrap();
        let cfg = DPConfig {
            lambda: rng.random_range(0.0..0.5),
            tau_max,
            smoothness_sign: if rng.random_bool(0.5) { 1 } else { -1 },
            min_support: 0.0,
        };
        let table = dp_solve(&vd, &cfg).unwrap();
        let path = extract_path(&table, &vd).unwrap();
        let got = path.energy(&cfg);
        let want = exhaustive_min_energy(&vd, &cfg);
        assert!(
            (got - want).abs() <= 1e-9,
            "case {case}: solver energy {got}, exhaustive minimum {want}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    report(
        "criterion 1 (search optimality)",
        &format!("200 random grids match the exhaustive minimum within 1e-9 in {elapsed:?}"),
    );
}

#[test]
fn criterion_2_road_model_recovery() {
    let cfg = DPConfig::default();
    let (width, height) = (1242usize, 375usize);
    let budget = (width * height * 15) / 100;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut hits = 0;
    let mut worst: f64 = 0.0;
    let start = Instant::now();
    for i in 0..50u64 {
        let alpha1: f64 = rng.random_range(0.1..=0.6);
        let v_py =
            rng.random_range((0.15 * height as f64) as usize..=(0.5 * height as f64) as usize);
        let alpha0 = -alpha1 * v_py as f64;

        // Up to two obstacles within the 15%-of-pixels budget, standing on
        // the road below the horizon.
        let mut obstacles = Vec::new();
        let mut used = 0usize;
        for _ in 0..rng.random_range(0..=2u32) {
            let w = rng.random_range(60..=300usize);
            let h = rng.random_range(40..=150usize);
            if used + w * h > budget {
                continue;
            }
            let contact = rng.random_range((v_py + h + 20).min(height - 2)..=height - 2);
            let ground = alpha0 + alpha1 * contact as f64;
            let u0 = rng.random_range(0..width - w);
            obstacles.push(Obstacle {
                u0,
                v0: contact - h,
                width: w,
                height: h,
                disparity: ground + rng.random_range(2.0..30.0),
            });
            used += w * h;
        }

        let scene = generate(&SceneParams {
            width,
            height,
            alpha0,
            alpha1,
            texture_seed: i,
            obstacles,
            noise_sigma: 0.01,
        })
        .unwrap();

        let frame = Instant::now();
        let m = fit_road(&scene.disp, &cfg).unwrap();
        let frame_time = frame.elapsed();
        assert!(frame_time.as_secs_f64() < 1.0, "scene {i}: fit took {frame_time:?}");

        let rel = (m.alpha1 - alpha1).abs() / alpha1;
        let dv = (m.v_py as i64 - scene.model.v_py as i64).abs();
        worst = worst.max(rel);
        if rel <= 0.02 && dv <= 2 {
            hits += 1;
        }
    }
    assert!(hits >= 48, "only {hits}/50 scenes recovered within tolerance");
    report(
        "criterion 2 (road-model recovery)",
        &format!(
            "{hits}/50 scenes within 2% slope and +-2 rows (worst slope error {worst:.4}) in {:?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_3_warp_aligns_the_road() {
    let mut worst_ratio = f64::INFINITY;
    let mut worst_mad: f64 = 0.0;
    for (seed, alpha0, alpha1) in [(11u64, -20.0, 0.25), (12, -45.0, 0.45), (13, -14.0, 0.12)] {
        let scene = generate(&SceneParams {
            width: 1242,
            height: 375,
            alpha0,
            alpha1,
            texture_seed: seed,
            obstacles: vec![],
            noise_sigma: 0.0,
        })
        .unwrap();
        let warped = transform_right_to_left(&scene.right, &scene.model).unwrap();
        let mut warped_sum = 0.0f64;
        let mut raw_sum = 0.0f64;
        let mut n = 0u64;
        for v in 0..375 {
            for u in 0..1242 {
                if !scene.road_mask.get(u, v) || !warped.valid.get(u, v) {
                    continue;
                }
                for c in 0..3 {
                    let l = scene.left.sample(u, v, c);
                    warped_sum += (warped.image.sample(u, v, c) - l).abs() as f64;
                    raw_sum += (scene.right.sample(u, v, c) - l).abs() as f64;
                    n += 1;
                }
            }
        }
        let mad = warped_sum / n as f64;
        let raw = raw_sum / n as f64;
        assert!(mad < 0.02, "seed {seed}: warped MAD {mad}");
        assert!(raw >= 5.0 * mad, "seed {seed}: raw {raw} not 5x warped {mad}");
        worst_mad = worst_mad.max(mad);
        worst_ratio = worst_ratio.min(raw / mad);
    }
    report(
        "criterion 3 (warp consistency)",
        &format!(
            "worst road MAD {worst_mad:.5} (< 0.02), worst unwarped/warped ratio {worst_ratio:.1}x (>= 5x)"
        ),
    );
}

/// Reference sweep: enumerate every achievable confusion point by sorting
/// the distinct probabilities and cutting between them, then report the
/// best F1 and the same 101-point interpolated AP.
fn oracle_maxf_ap(prob: &ProbabilityMap, gt: &BinaryMask) -> (f64, f64) {
    let mut cuts: Vec<f64> = prob.entries().to_vec();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    // Under strict `>` with thresholds drawn from [0, 1], the reachable
    // masks are exactly: one cut at each distinct value, plus the cut at 0
    // (which admits everything when the minimum value is positive).
    let mut thresholds = vec![0.0];
    thresholds.extend(cuts.iter().copied().filter(|c| *c != 0.0));

    let mut points = Vec::new();
    for t in thresholds {
        let (mut tp, mut fp, mut fnn) = (0u64, 0u64, 0u64);
        for (p, g) in prob.entries().iter().zip(gt.entries()) {
            let pred = *p > t;
            match (pred, *g) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fnn += 1,
                (false, false) => {}
            }
        }
        let pre = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let rec = if tp + fnn == 0 { 0.0 } else { tp as f64 / (tp + fnn) as f64 };
        let f1 = if pre + rec == 0.0 { 0.0 } else { 2.0 * pre * rec / (pre + rec) };
        points.push((pre, rec, f1));
    }
    let maxf = points.iter().map(|p| p.2).fold(0.0f64, f64::max);
    let mut ap_sum = 0.0;
    for k in 0..=100 {
        let r = k as f64 / 100.0;
        let best = points
            .iter()
            .filter(|p| p.1 >= r)
            .map(|p| p.0)
            .fold(0.0f64, f64::max);
        ap_sum += best;
    }
    (maxf, ap_sum / 101.0)
}

#[test]
fn criterion_4_sweep_matches_the_cutpoint_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for case in 0..100 {
        // Probabilities on the 1/255 lattice, like 8-bit inputs.
        let probs: Vec<f64> =
            (0..64).map(|_| rng.random_range(0..=255u32) as f64 / 255.0).collect();
        let gt_bits: Vec<bool> = (0..64).map(|_| rng.random_bool(0.5)).collect();
        if !gt_bits.iter().any(|&b| b) {
            continue;
        }
        let prob = ProbabilityMap::new(8, 8, probs).unwrap();
        let gt = BinaryMask::new(8, 8, gt_bits).unwrap();
        let result = sweep(&prob, &gt, None, 256).unwrap();
        let (want_maxf, want_ap) = oracle_maxf_ap(&prob, &gt);
        assert!(
            (result.report.maxf - want_maxf).abs() <= 1e-12,
            "case {case}: maxf {} vs oracle {want_maxf}",
            result.report.maxf
        );
        assert!(
            (result.report.ap - want_ap).abs() <= 1e-12,
            "case {case}: ap {} vs oracle {want_ap}",
            result.report.ap
        );
    }
    report(
        "criterion 4 (metric oracle)",
        "sweep maxf/ap match the sorted-cutpoint oracle on 100 random 8x8 pairs",
    );
}

#[test]
fn criterion_5_fnr_complements_recall() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..10_000 {
        let c = ConfusionCounts {
            tp: rng.random_range(0..1000),
            fp: rng.random_range(0..1000),
            tn: rng.random_range(0..1000),
            fn_: rng.random_range(0..1000),
        };
        let m = point_metrics(&c);
        assert_eq!(m.fnr + m.rec, if c.tp + c.fn_ > 0 { 1.0 } else { 0.0 });
    }
    // The published operating point: recall 91.60% pairs with FNR 8.40%.
    let c = ConfusionCounts { tp: 9160, fp: 0, tn: 0, fn_: 840 };
    let m = point_metrics(&c);
    assert_eq!(m.rec, 0.916);
    assert_eq!(format!("{:.4}", m.fnr), "0.0840");
    assert_eq!(m.fnr + m.rec, 1.0);
    report(
        "criterion 5 (fnr identity)",
        "fnr = 1 - rec exactly on 10000 random counts and the 91.60/8.40 pair",
    );
}

#[test]
fn criterion_6_shape_contract() {
    let arch = ArchitectureSpec::pt_resnet();
    let trace = trace_shapes(&arch, 64, 64, 7).unwrap();
    let block4 = trace
        .stages
        .iter()
        .find(|s| s.name == "block4")
        .expect("trace names the final encoder block");
    assert_eq!((block4.height, block4.width), (4, 4), "encoder end is input area / 256");
    let last = trace.final_stage();
    assert_eq!(
        (last.height, last.width, last.channels),
        (64, 64, 1),
        "probability output matches the input grid"
    );

    // The validator pins the topology: 4 blocks of stride 2, 5 branches,
    // dilation rates (4, 8, 16), skip from block 2.
    let mut wrong_blocks = arch.clone();
    wrong_blocks.encoder_blocks.pop();
    assert!(wrong_blocks.validate().is_err());
    let mut wrong_stride = arch.clone();
    wrong_stride.encoder_blocks[0].conv.stride = 1;
    assert!(wrong_stride.validate().is_err());
    let mut wrong_branches = arch.clone();
    wrong_branches.branches.pop();
    assert!(wrong_branches.validate().is_err());
    let mut wrong_rates = arch.clone();
    for b in &mut wrong_rates.branches {
        if let BranchKind::Atrous { rate } = &mut b.kind {
            *rate *= 2;
        }
    }
    assert!(wrong_rates.validate().is_err());
    let mut wrong_skip = arch.clone();
    wrong_skip.skip_block = 3;
    assert!(wrong_skip.validate().is_err());

    report(
        "criterion 6 (shape contract)",
        "64x64x7 -> block4 4x4, output 64x64x1; topology validator rejects 4 mutations",
    );
}

#[test]
fn criterion_7_formats_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for frame in 0..50 {
        let h = rng.random_range(1..=8usize);
        let w = rng.random_range(1..=8usize);
        let data: Vec<f32> =
            (0..7 * h * w).map(|_| rng.random_range(-4.0..4.0f32)).collect();
        let tensor = Tensor7::new(h, w, data).unwrap();
        let model = RoadModel {
            alpha0: rng.random_range(-100.0..0.0),
            alpha1: rng.random_range(0.01..1.0),
            v_py: rng.random_range(0..400),
            fit_residual: rng.random_range(0.0..2.0),
        };
        let bytes = write_pt7(&tensor, &model);
        let (t2, m2) = read_pt7(&bytes).unwrap();
        assert_eq!(tensor.samples(), t2.samples(), "frame {frame}: payload changed");
        assert_eq!(model, m2, "frame {frame}: model changed");
        let bytes2 = write_pt7(&t2, &m2);
        assert_eq!(bytes, bytes2, "frame {frame}: serialization not stable");

        // 16-bit disparity PNG: raw samples survive decode + re-encode.
        let width = rng.random_range(2..=64usize);
        let height = rng.random_range(1..=8usize);
        let max_raw = (width * 256 - 1).min(65535) as u16;
        let raws: Vec<u16> =
            (0..width * height).map(|_| rng.random_range(0..=max_raw)).collect();
        let mut be = Vec::new();
        for r in &raws {
            be.extend_from_slice(&r.to_be_bytes());
        }
        let png_bytes = {
            let mut out = Vec::new();
            let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Sixteen);
            let mut writer = enc.write_header().unwrap();
            writer.write_image_data(&be).unwrap();
            drop(writer);
            out
        };
        let disp = pngio::disparity_from_png16(&png_bytes).unwrap();
        let reencoded = pngio::disparity_to_png16(&disp).unwrap();
        let disp2 = pngio::disparity_from_png16(&reencoded).unwrap();
        assert_eq!(disp.values(), disp2.values(), "frame {frame}: disparity changed");
        assert_eq!(disp.validity(), disp2.validity(), "frame {frame}");
        // Raw samples, not just semantic values, are preserved.
        let raws2: Vec<u16> = disp2
            .values()
            .iter()
            .zip(disp2.validity())
            .map(|(v, ok)| if *ok { (f64::from(*v) * 256.0).round() as u16 } else { 0 })
            .collect();
        assert_eq!(raws, raws2, "frame {frame}: raw samples changed");
    }
    report(
        "criterion 7 (format round trips)",
        ".pt7 and 16-bit disparity PNG round-trip bit-exactly on 50 random frames",
    );
}

#[test]
fn criterion_8_training_results_are_out_of_scope() {
    // The published leaderboard figures (maximum F1 around 91%, average
    // precision around 91%) summarize a trained network evaluated on a
    // withheld server; nothing in this repository trains or runs such a
    // network, so those numbers are out of scope here. Criteria 1-7 cover
    // what is checkable at desk scale.
    report(
        "criterion 8 (out-of-scope note)",
        "leaderboard metrics need a trained network; replaced by criteria 1-7",
    );
}
