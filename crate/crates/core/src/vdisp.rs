//! Row-wise disparity histograms (the "v-disparity" representation).
//!
//! Each image row contributes a histogram over integer disparity bins; a
//! planar road surface concentrates its mass along a straight line in this
//! map, which is what the profile search in [`crate::roadfit`] extracts.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::image::DisparityMap;

/// Histogram stack: one row per image row, one column per disparity bin.
///
/// Counts are stored bin-major (`count(d, v)` at `d * height + v`) so a
/// profile search touching whole bins stays cache-friendly.
#[derive(Debug, Clone, PartialEq)]
pub struct VDisparityMap {
    height: usize,
    d_bins: usize,
    counts: Vec<f64>,
    normalized: bool,
}

impl VDisparityMap {
    /// Wraps an existing count grid. `counts` is bin-major with
    /// `d_bins * height` entries, all finite and non-negative.
    pub fn from_counts(d_bins: usize, height: usize, counts: Vec<f64>, normalized: bool) -> Result<Self> {
        if d_bins == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "v-disparity grid must be non-empty, got {d_bins} bins x {height} rows"
            )));
        }
        if counts.len() != d_bins * height {
            return Err(Error::Shape(format!(
                "count buffer holds {} entries, expected {}",
                counts.len(),
                d_bins * height
            )));
        }
        if let Some(c) = counts.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::Parameter(format!(
                "histogram counts must be finite and non-negative, got {c}"
            )));
        }
        Ok(Self { height, d_bins, counts, normalized })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn d_bins(&self) -> usize {
        self.d_bins
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    #[inline]
    pub fn count(&self, d: usize, v: usize) -> f64 {
        self.counts[d * self.height + v]
    }

    /// Sum over all bins of row `v`.
    pub fn row_sum(&self, v: usize) -> f64 {
        (0..self.d_bins).map(|d| self.count(d, v)).sum()
    }

    /// Largest entry in the grid.
    pub fn max_count(&self) -> f64 {
        self.counts.iter().copied().fold(0.0, f64::max)
    }

    /// Same histograms with the row axis mirrored (`v -> height - 1 - v`).
    ///
    /// The profile search steps from each bin to the next at a row
    /// at-or-above; a road line has disparity growing downward, so the
    /// search runs on the mirrored map and the result is mirrored back.
    pub fn flip_rows(&self) -> Self {
        let mut counts = vec![0.0; self.counts.len()];
        for d in 0..self.d_bins {
            for v in 0..self.height {
                counts[d * self.height + v] = self.count(d, self.height - 1 - v);
            }
        }
        Self { height: self.height, d_bins: self.d_bins, counts, normalized: self.normalized }
    }
}

/// Accumulates the per-row disparity histograms of `disp`.
///
/// Valid pixels are rounded to the nearest integer bin (halfway cases away
/// from zero). `d_max` fixes the last bin; when `None` it is the ceiling of
/// the largest valid disparity. Rounded values above an explicit `d_max` are
/// discarded, not clamped. With `normalize` every count is divided by the
/// image width, making bin mass comparable across frame sizes.
pub fn build_vdisparity(disp: &DisparityMap, d_max: Option<usize>, normalize: bool) -> Result<VDisparityMap> {
    let d_max = match d_max {
        Some(d) => d,
        None => match disp.max_valid() {
            Some(m) => fmath::ceilf(m) as usize,
            None => {
                return Err(Error::EmptyInput(
                    "no valid disparities and no explicit d_max; bin count is undefined".into(),
                ))
            }
        },
    };
    let d_bins = d_max + 1;
    let height = disp.height();
    let width = disp.width();

    let mut counts = vec![0.0f64; d_bins * height];
    for v in 0..height {
        for u in 0..width {
            if !disp.is_valid(u, v) {
                continue;
            }
            let bin = fmath::roundf(disp.value(u, v)) as usize;
            if bin > d_max {
                continue;
            }
            counts[bin * height + v] += 1.0;
        }
    }
    if normalize {
        let w = width as f64;
        for c in counts.iter_mut() {
            *c /= w;
        }
    }
    VDisparityMap::from_counts(d_bins, height, counts, normalize)
}
