//! Right-to-left perspective alignment and horizon cropping.
//!
//! Under the planar road model, a road point imaged at `(u, v)` in the left
//! view appears at `(u - f(v), v)` in the right view. Shifting every right
//! row by `max(f(v), 0)` therefore registers the road surface of the two
//! views; off-road structure stays misaligned, which is what lets a network
//! treat left/right-warped disagreement as an obstacle cue.

use alloc::format;
use alloc::vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::image::{BinaryMask, DisparityMap, Image};
use crate::roadfit::RoadModel;

/// A warped image plus the mask of pixels whose source column fell inside
/// the input. Samples under invalid mask entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedImage {
    pub image: Image,
    pub valid: BinaryMask,
}

/// Resamples the right image into left coordinates: row `v` of the output
/// reads the input at column `u - max(f(v), 0)` with linear interpolation
/// along the row. Source columns outside `[0, width - 1]` produce invalid,
/// zero-valued pixels.
pub fn transform_right_to_left(right: &Image, model: &RoadModel) -> Result<WarpedImage> {
    if !model.alpha0.is_finite() || !model.alpha1.is_finite() {
        return Err(Error::Parameter(format!(
            "road model coefficients must be finite, got alpha0 = {}, alpha1 = {}",
            model.alpha0, model.alpha1
        )));
    }
    let (w, h, ch) = (right.width(), right.height(), right.channels());
    let mut data = vec![0.0f32; w * h * ch];
    let mut valid = vec![false; w * h];
    for v in 0..h {
        let shift = model.row_shift(v);
        for u in 0..w {
            let src = u as f64 - shift;
            if src < 0.0 || src > (w - 1) as f64 {
                continue;
            }
            let i0 = fmath::floor(src) as usize;
            let i1 = (i0 + 1).min(w - 1);
            let frac = (src - i0 as f64) as f32;
            valid[v * w + u] = true;
            for c in 0..ch {
                let a = right.sample(i0, v, c);
                let b = right.sample(i1, v, c);
                let blended = a + (b - a) * frac;
                data[(v * w + u) * ch + c] = blended.clamp(0.0, 1.0);
            }
        }
    }
    Ok(WarpedImage {
        image: Image::new(w, h, ch, data)?,
        valid: BinaryMask::new(w, h, valid)?,
    })
}

/// Drops every row above the vanishing row, keeping `v_py..height`.
///
/// Implemented for each plane that flows into the stacked network input so
/// a pipeline can crop all of them consistently with one call shape.
pub trait CropAboveHorizon: Sized {
    fn crop_above_horizon(&self, v_py: usize) -> Result<Self>;
}

impl CropAboveHorizon for Image {
    fn crop_above_horizon(&self, v_py: usize) -> Result<Self> {
        self.rows_from(v_py)
    }
}

impl CropAboveHorizon for DisparityMap {
    fn crop_above_horizon(&self, v_py: usize) -> Result<Self> {
        self.rows_from(v_py)
    }
}

impl CropAboveHorizon for BinaryMask {
    fn crop_above_horizon(&self, v_py: usize) -> Result<Self> {
        self.rows_from(v_py)
    }
}

impl CropAboveHorizon for WarpedImage {
    fn crop_above_horizon(&self, v_py: usize) -> Result<Self> {
        Ok(WarpedImage {
            image: self.image.rows_from(v_py)?,
            valid: self.valid.rows_from(v_py)?,
        })
    }
}
