//! `transform`: warp a right-camera image into the left view under a road
//! model; writes the warped image plus a 1-bit validity mask marking pixels
//! whose source column fell inside the frame.

use crate::error::Result;
use crate::{files, pngio};
use ptroad_core::transform_right_to_left;
use std::path::Path;

pub fn run(right: &Path, model: &Path, out_image: &Path, out_valid: &Path) -> Result<()> {
    let img = files::load_image(right)?;
    let model = files::load_model(model)?;
    let warped = transform_right_to_left(&img, &model)?;
    files::write_atomic(out_image, &pngio::image_to_png(&warped.image)?)?;
    files::write_atomic(out_valid, &pngio::mask_to_png1(&warped.valid)?)
}
