//! `eval`: score a road-probability map against ground truth with a
//! threshold sweep; writes the metric report as JSON and, optionally, the
//! per-threshold curve as CSV and the binary mask at the configured
//! threshold as a 1-bit PNG.

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::pngio::GroundTruth;
use crate::{files, pngio};
use ptroad_core::{sweep, threshold_probability, BinaryMask};
use std::path::PathBuf;

pub struct EvalPaths {
    pub prob: PathBuf,
    pub ground_truth: PathBuf,
    pub out_report: PathBuf,
    pub valid: Option<PathBuf>,
    pub curve: Option<PathBuf>,
    pub mask_out: Option<PathBuf>,
}

pub fn run(paths: &EvalPaths, cfg: &RunConfig) -> Result<()> {
    let prob = files::load_probability(&paths.prob)?;
    let gt_bytes = files::read_bytes(&paths.ground_truth)?;
    let (road, embedded_valid) = match pngio::ground_truth_from_png(&gt_bytes)
        .map_err(CliError::at_path(&paths.ground_truth))?
    {
        GroundTruth::Gray(road) => (road, None),
        GroundTruth::Color { road, valid } => (road, Some(valid)),
    };
    let extra_valid = match &paths.valid {
        Some(p) => Some(files::load_mask(p)?),
        None => None,
    };
    let valid = intersect(embedded_valid, extra_valid)?;

    let result = sweep(&prob, &road, valid.as_ref(), cfg.n_thresholds)?;
    files::write_json(&paths.out_report, &result.report)?;
    if let Some(p) = &paths.curve {
        files::write_atomic(p, result.curve_csv().as_bytes())?;
    }
    if let Some(p) = &paths.mask_out {
        let mask = threshold_probability(&prob, cfg.threshold)?;
        files::write_atomic(p, &pngio::mask_to_png1(&mask)?)?;
    }
    Ok(())
}

/// Intersects the two optional validity masks.
fn intersect(
    a: Option<BinaryMask>,
    b: Option<BinaryMask>,
) -> Result<Option<BinaryMask>> {
    match (a, b) {
        (Some(a), Some(b)) => {
            if a.width() != b.width() || a.height() != b.height() {
                return Err(CliError::usage(format!(
                    "validity mask is {}x{} but ground truth is {}x{}",
                    b.width(),
                    b.height(),
                    a.width(),
                    a.height()
                )));
            }
            let bits = a
                .entries()
                .iter()
                .zip(b.entries())
                .map(|(&x, &y)| x && y)
                .collect();
            Ok(Some(BinaryMask::new(a.width(), a.height(), bits)?))
        }
        (Some(a), None) => Ok(Some(a)),
        (None, Some(b)) => Ok(Some(b)),
        (None, None) => Ok(None),
    }
}
