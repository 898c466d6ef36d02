//! Pixel buffer types shared by the whole pipeline.
//!
//! Conventions, used everywhere without exception:
//! - row index `v` grows downward, column index `u` grows rightward;
//! - intensities are `f32` in `[0, 1]`;
//! - disparities are left-referenced, in pixels, `f32 >= 0`, and every valid
//!   disparity is strictly less than the image width;
//! - invalid disparity cells carry the value `0.0` and a cleared validity bit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Interleaved row-major intensity image, 1 (grayscale) or 3 (RGB) channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl Image {
    /// Builds an image, validating dimensions and the `[0, 1]` sample range.
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::Parameter(format!(
                "image must have 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::Shape(format!(
                "image buffer holds {} samples, expected {}",
                data.len(),
                width * height * channels
            )));
        }
        if let Some(s) = data.iter().find(|s| !s.is_finite() || **s < 0.0 || **s > 1.0) {
            return Err(Error::Parameter(format!(
                "image samples must be finite and within [0, 1], got {s}"
            )));
        }
        Ok(Self { width, height, channels, data })
    }

    /// Builds an image by evaluating `f(u, v, c)` at every sample.
    /// Samples are clamped to `[0, 1]`, so `f` may overshoot slightly.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * channels);
        for v in 0..height {
            for u in 0..width {
                for c in 0..channels {
                    data.push(f(u, v, c).clamp(0.0, 1.0));
                }
            }
        }
        Self::new(width, height, channels, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Sample at `(u, v)`, channel `c`.
    #[inline]
    pub fn sample(&self, u: usize, v: usize, c: usize) -> f32 {
        self.data[(v * self.width + u) * self.channels + c]
    }

    /// One full image row, `width * channels` interleaved samples.
    #[inline]
    pub fn row(&self, v: usize) -> &[f32] {
        let stride = self.width * self.channels;
        &self.data[v * stride..(v + 1) * stride]
    }

    /// Flat interleaved sample buffer.
    pub fn samples(&self) -> &[f32] {
        &self.data
    }

    /// Copy of the rows `v0..height`, used to drop everything above the
    /// fitted horizon.
    pub(crate) fn rows_from(&self, v0: usize) -> Result<Self> {
        if v0 >= self.height {
            return Err(Error::Parameter(format!(
                "crop row {v0} out of range for height {}",
                self.height
            )));
        }
        let stride = self.width * self.channels;
        Self::new(
            self.width,
            self.height - v0,
            self.channels,
            self.data[v0 * stride..].to_vec(),
        )
    }

    /// Largest absolute difference between horizontally adjacent samples.
    /// Bounds the error any single linear resampling of a row can introduce.
    pub fn max_adjacent_delta(&self) -> f32 {
        let mut worst = 0.0f32;
        for v in 0..self.height {
            for u in 1..self.width {
                for c in 0..self.channels {
                    let d = crate::fmath::absf(self.sample(u, v, c) - self.sample(u - 1, v, c));
                    if d > worst {
                        worst = d;
                    }
                }
            }
        }
        worst
    }
}

/// Left-referenced disparity map with per-pixel validity.
///
/// Invariants: every valid value is finite, `>= 0`, and `< width`; invalid
/// cells store `0.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    values: Vec<f32>,
    valid: Vec<bool>,
}

impl DisparityMap {
    /// Builds a map, validating the range invariant on valid cells and
    /// canonicalizing invalid cells to `0.0`.
    pub fn new(width: usize, height: usize, mut values: Vec<f32>, valid: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "disparity dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height || valid.len() != width * height {
            return Err(Error::Shape(format!(
                "disparity buffers hold {} values / {} flags, expected {}",
                values.len(),
                valid.len(),
                width * height
            )));
        }
        for (d, ok) in values.iter_mut().zip(valid.iter()) {
            if *ok {
                if !d.is_finite() || *d < 0.0 || *d >= width as f32 {
                    return Err(Error::Parameter(format!(
                        "valid disparity {d} outside [0, width = {width})"
                    )));
                }
            } else {
                *d = 0.0;
            }
        }
        Ok(Self { width, height, values, valid })
    }

    /// All-invalid map of the given size.
    pub fn invalid(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height], vec![false; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn value(&self, u: usize, v: usize) -> f32 {
        self.values[v * self.width + u]
    }

    #[inline]
    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        self.valid[v * self.width + u]
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|b| **b).count()
    }

    /// Largest valid disparity, or `None` when every cell is invalid.
    pub fn max_valid(&self) -> Option<f32> {
        let mut best: Option<f32> = None;
        for (d, ok) in self.values.iter().zip(self.valid.iter()) {
            if *ok && best.is_none_or(|b| *d > b) {
                best = Some(*d);
            }
        }
        best
    }

    pub(crate) fn rows_from(&self, v0: usize) -> Result<Self> {
        if v0 >= self.height {
            return Err(Error::Parameter(format!(
                "crop row {v0} out of range for height {}",
                self.height
            )));
        }
        Self::new(
            self.width,
            self.height - v0,
            self.values[v0 * self.width..].to_vec(),
            self.valid[v0 * self.width..].to_vec(),
        )
    }
}

/// Per-pixel boolean mask (road / not-road, valid / ignore).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::Shape(format!(
                "mask buffer holds {} entries, expected {}",
                data.len(),
                width * height
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> bool {
        self.data[v * self.width + u]
    }

    pub fn set(&mut self, u: usize, v: usize, value: bool) {
        self.data[v * self.width + u] = value;
    }

    pub fn entries(&self) -> &[bool] {
        &self.data
    }

    pub fn count_true(&self) -> usize {
        self.data.iter().filter(|b| **b).count()
    }

    pub(crate) fn rows_from(&self, v0: usize) -> Result<Self> {
        if v0 >= self.height {
            return Err(Error::Parameter(format!(
                "crop row {v0} out of range for height {}",
                self.height
            )));
        }
        Self::new(self.width, self.height - v0, self.data[v0 * self.width..].to_vec())
    }
}

/// Per-pixel probability in `[0, 1]`.
///
/// Stored as `f64` so that values quantized from 8- or 16-bit files land on
/// exactly the same lattice as sweep thresholds `k / (n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ProbabilityMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "probability map dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::Shape(format!(
                "probability buffer holds {} entries, expected {}",
                data.len(),
                width * height
            )));
        }
        if let Some(p) = data.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0) {
            return Err(Error::Parameter(format!(
                "probabilities must be finite and within [0, 1], got {p}"
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[v * self.width + u]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_rejects_out_of_range_samples() {
        let err = Image::new(2, 1, 1, vec![0.5, 1.5]).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)), "got {err:?}");
    }

    #[test]
    fn image_rejects_bad_channel_count() {
        let err = Image::new(1, 1, 2, vec![0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)), "got {err:?}");
    }

    #[test]
    fn disparity_rejects_value_at_width() {
        // 4.0 is not a legal disparity in a 4-wide map; 3.999 is.
        let err = DisparityMap::new(4, 1, vec![0.0, 0.0, 0.0, 4.0], vec![true; 4]).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)), "got {err:?}");
        DisparityMap::new(4, 1, vec![0.0, 0.0, 0.0, 3.999], vec![true; 4]).unwrap();
    }

    #[test]
    fn disparity_canonicalizes_invalid_cells_to_zero() {
        let m = DisparityMap::new(2, 1, vec![7.5, 1.0], vec![false, true]).unwrap();
        assert_eq!(m.value(0, 0), 0.0);
        assert!(!m.is_valid(0, 0));
        assert_eq!(m.value(1, 0), 1.0);
        assert_eq!(m.max_valid(), Some(1.0));
    }

    #[test]
    fn all_invalid_map_has_no_max() {
        let m = DisparityMap::invalid(3, 2).unwrap();
        assert_eq!(m.max_valid(), None);
        assert_eq!(m.valid_count(), 0);
    }
}
