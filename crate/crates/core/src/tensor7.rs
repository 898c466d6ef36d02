//! Stacked network input: left color, road-aligned right color, and
//! disparity in one 7-plane tensor, with a compact binary container.
//!
//! Container layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "PT7T"
//! 4       4     version (1)
//! 8       4     height
//! 12      4     width
//! 16      4     channels (7)
//! 20      4     reserved (0)
//! 24      4*7*h*w  samples, f32, plane-major then row-major
//! ...     4     metadata length n
//! ...     n     metadata: road-model JSON (alpha0, alpha1, v_py, fit_residual)
//! ```

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::{DisparityMap, Image};
use crate::roadfit::RoadModel;
use crate::warp::WarpedImage;

pub const TENSOR7_MAGIC: [u8; 4] = *b"PT7T";
pub const TENSOR7_VERSION: u32 = 1;
pub const TENSOR7_CHANNELS: usize = 7;
const HEADER_LEN: usize = 24;

/// Seven planes over one image grid, stored plane-major. Planes 0-2 are the
/// left image, 3-5 the warped right image, 6 the disparity (so only plane 6
/// may exceed 1.0).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor7 {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl Tensor7 {
    /// `data` is plane-major: sample `(c, v, u)` lives at
    /// `(c * height + v) * width + u`. All samples must be finite.
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Shape(format!(
                "tensor extents must be positive, got {height}x{width}"
            )));
        }
        let expect = TENSOR7_CHANNELS * height * width;
        if data.len() != expect {
            return Err(Error::Shape(format!(
                "tensor of {height}x{width} needs {expect} samples, got {}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|s| !s.is_finite()) {
            return Err(Error::Shape(format!("non-finite sample at index {bad}")));
        }
        Ok(Self { height, width, data })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, c: usize, v: usize, u: usize) -> f32 {
        self.data[(c * self.height + v) * self.width + u]
    }

    /// One full plane, row-major.
    pub fn plane(&self, c: usize) -> &[f32] {
        let extent = self.height * self.width;
        &self.data[c * extent..(c + 1) * extent]
    }

    pub fn samples(&self) -> &[f32] {
        &self.data
    }
}

/// Stacks the three inputs into one tensor. All must share one grid and both
/// color inputs must have three channels; invalid disparity cells contribute
/// zero (they already store zero), as do invalid warped pixels.
pub fn assemble(left: &Image, right_warped: &WarpedImage, disp: &DisparityMap) -> Result<Tensor7> {
    if left.channels() != 3 || right_warped.image.channels() != 3 {
        return Err(Error::Shape(format!(
            "color inputs must have 3 channels, got {} and {}",
            left.channels(),
            right_warped.image.channels()
        )));
    }
    let (h, w) = (left.height(), left.width());
    let same = |ih: usize, iw: usize| ih == h && iw == w;
    if !same(right_warped.image.height(), right_warped.image.width())
        || !same(disp.height(), disp.width())
    {
        return Err(Error::Shape(format!(
            "grids disagree: left {h}x{w}, warped {}x{}, disparity {}x{}",
            right_warped.image.height(),
            right_warped.image.width(),
            disp.height(),
            disp.width()
        )));
    }

    let extent = h * w;
    let mut data = Vec::with_capacity(TENSOR7_CHANNELS * extent);
    for c in 0..3 {
        for v in 0..h {
            for u in 0..w {
                data.push(left.sample(u, v, c));
            }
        }
    }
    for c in 0..3 {
        for v in 0..h {
            for u in 0..w {
                data.push(right_warped.image.sample(u, v, c));
            }
        }
    }
    data.extend_from_slice(disp.values());
    Tensor7::new(h, w, data)
}

/// Serializes tensor plus road model. The inverse of [`read_pt7`]: the byte
/// stream round-trips every sample and model field bit-exactly.
pub fn write_pt7(tensor: &Tensor7, model: &RoadModel) -> Vec<u8> {
    let meta = serde_json::to_string(model).expect("road model always serializes");
    let meta = meta.as_bytes();
    let mut out =
        Vec::with_capacity(HEADER_LEN + 4 * tensor.data.len() + 4 + meta.len());
    out.extend_from_slice(&TENSOR7_MAGIC);
    out.extend_from_slice(&TENSOR7_VERSION.to_le_bytes());
    out.extend_from_slice(&(tensor.height as u32).to_le_bytes());
    out.extend_from_slice(&(tensor.width as u32).to_le_bytes());
    out.extend_from_slice(&(TENSOR7_CHANNELS as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for s in &tensor.data {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    out.extend_from_slice(meta);
    out
}

fn read_u32(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    let end = offset.checked_add(4).filter(|&e| e <= bytes.len());
    match end {
        Some(end) => {
            let mut raw = [0u8; 4];
            raw.copy_from_slice(&bytes[offset..end]);
            Ok(u32::from_le_bytes(raw))
        }
        None => Err(Error::Format { offset, what: format!("truncated {what}") }),
    }
}

/// Parses a byte stream produced by [`write_pt7`]. Corrupt input of any
/// shape yields a format error (with the offset of the first problem), never
/// a panic.
pub fn read_pt7(bytes: &[u8]) -> Result<(Tensor7, RoadModel)> {
    if bytes.len() < 4 || bytes[..4] != TENSOR7_MAGIC {
        return Err(Error::Format { offset: 0, what: "bad magic, expected \"PT7T\"".into() });
    }
    let version = read_u32(bytes, 4, "version")?;
    if version != TENSOR7_VERSION {
        return Err(Error::Format {
            offset: 4,
            what: format!("unsupported version {version}"),
        });
    }
    let height = read_u32(bytes, 8, "height")? as usize;
    let width = read_u32(bytes, 12, "width")? as usize;
    let channels = read_u32(bytes, 16, "channels")? as usize;
    if channels != TENSOR7_CHANNELS {
        return Err(Error::Format {
            offset: 16,
            what: format!("expected 7 channels, got {channels}"),
        });
    }
    let reserved = read_u32(bytes, 20, "reserved")?;
    if reserved != 0 {
        return Err(Error::Format {
            offset: 20,
            what: format!("reserved field must be 0, got {reserved}"),
        });
    }
    if height == 0 || width == 0 {
        return Err(Error::Format { offset: 8, what: "zero tensor extent".into() });
    }
    let n_samples = TENSOR7_CHANNELS
        .checked_mul(height)
        .and_then(|n| n.checked_mul(width))
        .ok_or(Error::Format { offset: 8, what: "tensor extent overflows".into() })?;
    let payload_len = n_samples
        .checked_mul(4)
        .ok_or(Error::Format { offset: 8, what: "payload size overflows".into() })?;
    let meta_len_at = HEADER_LEN.checked_add(payload_len).ok_or(Error::Format {
        offset: 8,
        what: "payload size overflows".into(),
    })?;
    if bytes.len() < meta_len_at {
        return Err(Error::Format {
            offset: bytes.len(),
            what: format!("truncated payload, need {meta_len_at} bytes"),
        });
    }

    let mut data = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let at = HEADER_LEN + 4 * i;
        let mut raw = [0u8; 4];
        raw.copy_from_slice(&bytes[at..at + 4]);
        let s = f32::from_le_bytes(raw);
        if !s.is_finite() {
            return Err(Error::Format { offset: at, what: "non-finite sample".into() });
        }
        data.push(s);
    }

    let meta_len = read_u32(bytes, meta_len_at, "metadata length")? as usize;
    let meta_at = meta_len_at + 4;
    let total = meta_at.checked_add(meta_len).ok_or(Error::Format {
        offset: meta_len_at,
        what: "metadata size overflows".into(),
    })?;
    if bytes.len() < total {
        return Err(Error::Format {
            offset: bytes.len(),
            what: format!("truncated metadata, need {total} bytes"),
        });
    }
    if bytes.len() > total {
        return Err(Error::Format {
            offset: total,
            what: format!("{} trailing bytes", bytes.len() - total),
        });
    }
    let meta = core::str::from_utf8(&bytes[meta_at..total]).map_err(|e| Error::Format {
        offset: meta_at + e.valid_up_to(),
        what: "metadata is not UTF-8".into(),
    })?;
    let model: RoadModel = serde_json::from_str(meta).map_err(|e| Error::Format {
        offset: meta_at,
        what: format!("metadata is not a road-model document: {e}"),
    })?;
    let tensor = Tensor7::new(height, width, data)?;
    Ok((tensor, model))
}

/// Human-readable one-line description, used by CLI diagnostics.
pub fn describe(tensor: &Tensor7) -> String {
    format!("{}x{}x7 road tensor", tensor.height, tensor.width)
}
