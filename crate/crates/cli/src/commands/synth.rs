//! `synth`: generate a synthetic planar-road stereo scene with exact ground
//! truth. Writes `left.png`, `right.png`, `disp.png` (16-bit, x256
//! convention), `road_mask.png`, and `model.json` into the output
//! directory; with `--stem s` the names become `s_left.png` etc., matching
//! the batch pipeline's input convention.

use crate::error::{CliError, Result};
use crate::{files, pngio};
use ptroad_core::{generate, SceneParams};
use std::path::Path;

pub fn run(out_dir: &Path, params: &SceneParams, stem: Option<&str>) -> Result<()> {
    let scene = generate(params)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let name = |base: &str| match stem {
        Some(s) => out_dir.join(format!("{s}_{base}")),
        None => out_dir.join(base),
    };
    files::write_atomic(&name("left.png"), &pngio::image_to_png(&scene.left)?)?;
    files::write_atomic(&name("right.png"), &pngio::image_to_png(&scene.right)?)?;
    files::write_atomic(&name("disp.png"), &pngio::disparity_to_png16(&scene.disp)?)?;
    files::write_atomic(&name("road_mask.png"), &pngio::mask_to_png1(&scene.road_mask)?)?;
    files::write_json(&name("model.json"), &scene.model)
}
