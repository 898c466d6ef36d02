//! Command-line surface: argument definitions and dispatch.

use crate::commands;
use crate::config::{ConfigArgs, RunConfig};
use crate::error::{CliError, Result};
use ptroad_core::{Obstacle, SceneParams};
use std::path::PathBuf;

#[derive(Debug, clap::Parser)]
#[command(
    name = "ptroad",
    version,
    about = "Stereo road-scene preprocessing and evaluation toolkit",
    long_about = "Builds v-disparity maps, fits the linear road profile, warps the right \
                  camera view into the left, packs 7-channel training tensors, evaluates \
                  road-probability maps, generates synthetic test scenes, and traces the \
                  segmentation network's layer shapes.\n\n\
                  Exit codes: 0 success; 2 usage, IO, or format error; 3 degenerate fit; \
                  4 non-road geometry (non-positive fitted slope); 5 invalid evaluation \
                  input (ground truth without positive pixels)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// Build the v-disparity histogram of a disparity image (CSV + PNG rendering)
    ///
    /// The CSV has one line per image row with one value per disparity bin;
    /// the PNG renders the same grid scaled by 255/max.
    Vdisp {
        /// Disparity image (16-bit PNG, value = raw/256, raw 0 = invalid)
        disparity: PathBuf,
        /// Output CSV path
        out_csv: PathBuf,
        /// Output PNG rendering path
        out_png: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Fit the linear road profile to a disparity image and write it as JSON
    ///
    /// The output records the fitted line (alpha0, alpha1), the vanishing
    /// row v_py, the fit residual, and the search parameters used.
    Fit {
        /// Disparity image (16-bit PNG, value = raw/256, raw 0 = invalid)
        disparity: PathBuf,
        /// Output model JSON path
        out_model: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Warp a right-camera image into the left view under a road model
    Transform {
        /// Right-camera image (8-bit grayscale or RGB PNG)
        right: PathBuf,
        /// Road model JSON (as written by fit or synth)
        model: PathBuf,
        /// Output warped image PNG
        out_image: PathBuf,
        /// Output 1-bit validity mask PNG
        out_valid: PathBuf,
    },

    /// Fit, warp, crop, and pack stereo frames into 7-channel tensors
    ///
    /// Single frame: pipeline LEFT RIGHT DISPARITY OUT_DIR writes frame.pt7,
    /// model.json, left_crop.png, right_warp.png, valid.png into OUT_DIR.
    /// Batch: pipeline DIR OUT_DIR scans DIR for <stem>_left.png,
    /// <stem>_right.png, <stem>_disp.png triples, processes them
    /// concurrently, and prefixes every output name with the stem.
    Pipeline {
        /// LEFT RIGHT DISPARITY OUT_DIR, or DIR OUT_DIR for batch mode
        #[arg(required = true, num_args = 2..=4, value_name = "PATH")]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Score a road-probability map against ground truth
    ///
    /// Sweeps n-thresholds evenly spaced probability cutoffs and reports
    /// the maximum F1, 101-point interpolated average precision, and the
    /// point metrics at the best threshold.
    Eval {
        /// Probability map (8- or 16-bit grayscale PNG scaled to [0, 1])
        prob: PathBuf,
        /// Ground truth: grayscale mask PNG, or color-coded RGB PNG
        /// (road = red and blue above half range, valid = red above)
        ground_truth: PathBuf,
        /// Output metric report JSON path
        out_report: PathBuf,
        /// Extra validity mask PNG; pixels outside it are ignored
        #[arg(long, value_name = "PNG")]
        valid: Option<PathBuf>,
        /// Also write the per-threshold (threshold, pre, rec, f1) curve CSV
        #[arg(long, value_name = "CSV")]
        curve: Option<PathBuf>,
        /// Also write the binary road mask at --threshold as a 1-bit PNG
        #[arg(long, value_name = "PNG")]
        mask_out: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Generate a synthetic planar-road stereo scene with exact ground truth
    ///
    /// Writes left.png, right.png, disp.png (16-bit disparity), road_mask.png,
    /// and model.json into OUT_DIR. Deterministic for a fixed seed.
    Synth {
        /// Output directory
        out_dir: PathBuf,
        /// Scene width in pixels
        #[arg(long, default_value_t = 1242)]
        width: usize,
        /// Scene height in pixels
        #[arg(long, default_value_t = 375)]
        height: usize,
        /// Road-line intercept: road disparity is alpha0 + alpha1 * row
        #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
        alpha0: f64,
        /// Road-line slope in disparity pixels per image row (positive)
        #[arg(long, default_value_t = 0.25)]
        alpha1: f64,
        /// Texture seed; equal seeds reproduce identical scenes
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Std-dev of per-pixel Gaussian intensity noise, at most 0.1
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Add a box obstacle: "u0,v0,width,height,disparity" (repeatable)
        #[arg(long = "obstacle", value_name = "SPEC", value_parser = parse_obstacle)]
        obstacles: Vec<Obstacle>,
        /// Prefix output names as <stem>_left.png etc. (matches batch inputs)
        #[arg(long)]
        stem: Option<String>,
    },

    /// Print the segmentation network's layer-shape trace for an input size
    Netshape {
        /// Input height in pixels
        #[arg(long)]
        height: usize,
        /// Input width in pixels
        #[arg(long)]
        width: usize,
        /// Also write the trace as JSON to this path
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
}

fn parse_obstacle(s: &str) -> std::result::Result<Obstacle, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(format!(
            "expected \"u0,v0,width,height,disparity\", got {} fields",
            parts.len()
        ));
    }
    Ok(Obstacle {
        u0: parts[0].parse().map_err(|e| format!("u0: {e}"))?,
        v0: parts[1].parse().map_err(|e| format!("v0: {e}"))?,
        width: parts[2].parse().map_err(|e| format!("width: {e}"))?,
        height: parts[3].parse().map_err(|e| format!("height: {e}"))?,
        disparity: parts[4].parse().map_err(|e| format!("disparity: {e}"))?,
    })
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Vdisp { disparity, out_csv, out_png, cfg } => {
            let cfg = RunConfig::resolve(&cfg)?;
            commands::vdisp::run(&disparity, &out_csv, &out_png, &cfg)
        }
        Command::Fit { disparity, out_model, cfg } => {
            let cfg = RunConfig::resolve(&cfg)?;
            commands::fit::run(&disparity, &out_model, &cfg)
        }
        Command::Transform { right, model, out_image, out_valid } => {
            commands::transform::run(&right, &model, &out_image, &out_valid)
        }
        Command::Pipeline { paths, cfg } => {
            let cfg = RunConfig::resolve(&cfg)?;
            match paths.as_slice() {
                [dir, out_dir] => commands::pipeline::run_batch(dir, out_dir, &cfg),
                [left, right, disparity, out_dir] => {
                    commands::pipeline::run_single(left, right, disparity, out_dir, &cfg)
                }
                _ => Err(CliError::usage(
                    "pipeline takes LEFT RIGHT DISPARITY OUT_DIR for one frame \
                     or DIR OUT_DIR for a directory of triples",
                )),
            }
        }
        Command::Eval { prob, ground_truth, out_report, valid, curve, mask_out, cfg } => {
            let cfg = RunConfig::resolve(&cfg)?;
            let paths = commands::eval::EvalPaths {
                prob,
                ground_truth,
                out_report,
                valid,
                curve,
                mask_out,
            };
            commands::eval::run(&paths, &cfg)
        }
        Command::Synth {
            out_dir,
            width,
            height,
            alpha0,
            alpha1,
            seed,
            noise,
            obstacles,
            stem,
        } => {
            let params = SceneParams {
                width,
                height,
                alpha0,
                alpha1,
                texture_seed: seed,
                obstacles,
                noise_sigma: noise,
            };
            commands::synth::run(&out_dir, &params, stem.as_deref())
        }
        Command::Netshape { height, width, json } => {
            commands::netshape::run(height, width, json.as_deref())
        }
    }
}
