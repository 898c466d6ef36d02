//! `fit`: extract the road profile from a disparity image and write the
//! fitted linear model (with the search parameters that produced it) as
//! JSON.

use crate::config::RunConfig;
use crate::error::Result;
use crate::files;
use ptroad_core::{build_vdisparity, fit_road_from_vdisparity, RoadModelRecord};
use std::path::Path;

pub fn run(disparity: &Path, out_model: &Path, cfg: &RunConfig) -> Result<()> {
    let disp = files::load_disparity(disparity)?;
    let vd = build_vdisparity(&disp, cfg.d_max, cfg.normalize)?;
    let model = fit_road_from_vdisparity(&vd, &cfg.dp)?;
    files::write_json(out_model, &RoadModelRecord::new(&model, &cfg.dp))
}
