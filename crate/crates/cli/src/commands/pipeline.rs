//! `pipeline`: the full preprocessing chain on a stereo frame — fit the
//! road model from disparity, warp the right image into the left view, crop
//! everything above the fitted vanishing row, stack the 7-channel tensor,
//! and write it with the model and inspection PNGs.
//!
//! Single-frame outputs in `out_dir`: `frame.pt7`, `model.json`,
//! `left_crop.png`, `right_warp.png`, `valid.png`. Batch mode scans a
//! directory for `<stem>_left.png` / `<stem>_right.png` / `<stem>_disp.png`
//! triples, processes them concurrently, and prefixes every output name
//! with the stem (`<stem>.pt7`, `<stem>_model.json`, ...).

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::{files, pngio};
use ptroad_core::{
    assemble, build_vdisparity, fit_road_from_vdisparity, transform_right_to_left, write_pt7,
    CropAboveHorizon, RoadModelRecord,
};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

struct FrameOutputs {
    pt7: PathBuf,
    model: PathBuf,
    left_crop: PathBuf,
    right_warp: PathBuf,
    valid: PathBuf,
}

impl FrameOutputs {
    fn in_dir(out_dir: &Path, stem: Option<&str>) -> Self {
        let name = |plain: &str, suffixed: &str| match stem {
            Some(s) => out_dir.join(format!("{s}{suffixed}")),
            None => out_dir.join(plain),
        };
        FrameOutputs {
            pt7: name("frame.pt7", ".pt7"),
            model: name("model.json", "_model.json"),
            left_crop: name("left_crop.png", "_left_crop.png"),
            right_warp: name("right_warp.png", "_right_warp.png"),
            valid: name("valid.png", "_valid.png"),
        }
    }
}

/// Annotates a core error with the pipeline stage that raised it.
fn in_stage<T>(
    stage: &'static str,
    r: std::result::Result<T, ptroad_core::Error>,
) -> Result<T> {
    r.map_err(|e| CliError::Stage { stage, source: Box::new(e.into()) })
}

fn process_frame(
    left_path: &Path,
    right_path: &Path,
    disparity_path: &Path,
    out: &FrameOutputs,
    cfg: &RunConfig,
) -> Result<()> {
    let left = files::load_image(left_path).map_err(CliError::in_stage("load"))?;
    let right = files::load_image(right_path).map_err(CliError::in_stage("load"))?;
    let disp = files::load_disparity(disparity_path).map_err(CliError::in_stage("load"))?;
    if left.width() != right.width()
        || left.height() != right.height()
        || left.channels() != right.channels()
        || left.width() != disp.width()
        || left.height() != disp.height()
    {
        return Err(CliError::Stage {
            stage: "load",
            source: Box::new(CliError::usage(format!(
                "stereo frame dimensions disagree: left {}x{}x{}, right {}x{}x{}, disparity {}x{}",
                left.width(),
                left.height(),
                left.channels(),
                right.width(),
                right.height(),
                right.channels(),
                disp.width(),
                disp.height(),
            ))),
        });
    }

    let vd = in_stage("fit", build_vdisparity(&disp, cfg.d_max, cfg.normalize))?;
    let model = in_stage("fit", fit_road_from_vdisparity(&vd, &cfg.dp))?;
    let warped = in_stage("transform", transform_right_to_left(&right, &model))?;
    let left_c = in_stage("crop", left.crop_above_horizon(model.v_py))?;
    let warped_c = in_stage("crop", warped.crop_above_horizon(model.v_py))?;
    let disp_c = in_stage("crop", disp.crop_above_horizon(model.v_py))?;
    let tensor = in_stage("assemble", assemble(&left_c, &warped_c, &disp_c))?;

    (|| {
        files::write_atomic(&out.pt7, &write_pt7(&tensor, &model))?;
        files::write_json(&out.model, &RoadModelRecord::new(&model, &cfg.dp))?;
        files::write_atomic(&out.left_crop, &pngio::image_to_png(&left_c)?)?;
        files::write_atomic(&out.right_warp, &pngio::image_to_png(&warped_c.image)?)?;
        files::write_atomic(&out.valid, &pngio::mask_to_png1(&warped_c.valid)?)
    })()
    .map_err(CliError::in_stage("write"))
}

pub fn run_single(
    left: &Path,
    right: &Path,
    disparity: &Path,
    out_dir: &Path,
    cfg: &RunConfig,
) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    process_frame(left, right, disparity, &FrameOutputs::in_dir(out_dir, None), cfg)
}

pub fn run_batch(dir: &Path, out_dir: &Path, cfg: &RunConfig) -> Result<()> {
    let mut stems = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let name = entry.file_name();
        let Some(stem) = name.to_str().and_then(|n| n.strip_suffix("_left.png")) else {
            continue;
        };
        if dir.join(format!("{stem}_right.png")).is_file()
            && dir.join(format!("{stem}_disp.png")).is_file()
        {
            stems.push(stem.to_string());
        } else {
            eprintln!("skipping {stem}: missing {stem}_right.png or {stem}_disp.png");
        }
    }
    if stems.is_empty() {
        return Err(CliError::usage(format!(
            "no stereo triples (<stem>_left.png, <stem>_right.png, <stem>_disp.png) found in {}",
            dir.display()
        )));
    }
    stems.sort();
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let mut failures: Vec<(String, CliError)> = stems
        .par_iter()
        .filter_map(|stem| {
            let out = FrameOutputs::in_dir(out_dir, Some(stem));
            match process_frame(
                &dir.join(format!("{stem}_left.png")),
                &dir.join(format!("{stem}_right.png")),
                &dir.join(format!("{stem}_disp.png")),
                &out,
                cfg,
            ) {
                Ok(()) => {
                    eprintln!("{stem}: ok");
                    None
                }
                Err(e) => Some((stem.clone(), e)),
            }
        })
        .collect();

    failures.sort_by(|a, b| a.0.cmp(&b.0));
    if failures.is_empty() {
        eprintln!("processed {} frames", stems.len());
        return Ok(());
    }
    for (stem, e) in failures.iter().skip(1) {
        eprintln!("{stem}: {e}");
    }
    let (stem, first) = failures.swap_remove(0);
    Err(CliError::WithPath { path: PathBuf::from(stem), source: Box::new(first) })
}
