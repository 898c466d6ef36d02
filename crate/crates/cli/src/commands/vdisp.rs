//! `vdisp`: v-disparity histogram of a disparity image, written as CSV
//! (one line per image row, one column per disparity bin) and as an 8-bit
//! PNG rendering scaled by 255/max.

use crate::config::RunConfig;
use crate::error::Result;
use crate::{files, pngio};
use ptroad_core::{build_vdisparity, DisparityMap};
use std::fmt::Write as _;
use std::path::Path;

pub fn run(disparity: &Path, out_csv: &Path, out_png: &Path, cfg: &RunConfig) -> Result<()> {
    let disp = files::load_disparity(disparity)?;
    // Resolving the bin count here keeps empty maps representable: with no
    // valid pixels the output is a single all-zero bin rather than an error.
    let d_max = cfg.d_max.unwrap_or_else(|| auto_d_max(&disp));
    let vd = build_vdisparity(&disp, Some(d_max), cfg.normalize)?;

    let mut csv = String::new();
    for v in 0..vd.height() {
        for d in 0..vd.d_bins() {
            if d > 0 {
                csv.push(',');
            }
            write!(csv, "{}", vd.count(d, v)).expect("writing to a string cannot fail");
        }
        csv.push('\n');
    }
    files::write_atomic(out_csv, csv.as_bytes())?;

    let mut cells = Vec::with_capacity(vd.d_bins() * vd.height());
    for v in 0..vd.height() {
        for d in 0..vd.d_bins() {
            cells.push(vd.count(d, v));
        }
    }
    let png = pngio::gray_rendering_to_png(vd.d_bins(), vd.height(), &cells)?;
    files::write_atomic(out_png, &png)
}

/// Smallest bin count that keeps every valid pixel: the ceiling of the
/// largest valid disparity, or 0 for an all-invalid map.
pub fn auto_d_max(disp: &DisparityMap) -> usize {
    disp.max_valid().map(|m| m.ceil() as usize).unwrap_or(0)
}
