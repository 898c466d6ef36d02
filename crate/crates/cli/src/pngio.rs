//! PNG codecs for every raster the tool reads or writes.
//!
//! Conventions:
//! * images: 8-bit grayscale or RGB, samples scaled to `[0, 1]` by 1/255;
//! * disparity: single-channel 16-bit, semantic value = raw/256, raw 0 marks
//!   the pixel invalid (so a valid disparity that rounds to raw 0 cannot be
//!   represented and decoding never yields one);
//! * probability: 8- or 16-bit grayscale scaled to `[0, 1]` by the depth's
//!   full range;
//! * masks: grayscale at depth 1, 8, or 16; a pixel is set when its sample
//!   exceeds half the depth's range (a 1-bit sample is set when 1).

use crate::error::{CliError, Result};
use ptroad_core::{BinaryMask, DisparityMap, Image, ProbabilityMap};
use std::io::Cursor;

/// A decoded PNG in its raw (unexpanded) representation.
struct RawPng {
    width: usize,
    height: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    data: Vec<u8>,
}

fn decode(bytes: &[u8]) -> Result<RawPng> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| CliError::decode(format!("png decode failed: {e}")))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| CliError::decode("png dimensions overflow the address space"))?;
    let mut data = vec![0u8; size];
    let info = reader
        .next_frame(&mut data)
        .map_err(|e| CliError::decode(format!("png decode failed: {e}")))?;
    data.truncate(info.buffer_size());
    Ok(RawPng {
        width: info.width as usize,
        height: info.height as usize,
        color: info.color_type,
        depth: info.bit_depth,
        data,
    })
}

/// Reassembles big-endian 16-bit samples from the decoder's byte stream.
fn be_u16_samples(data: &[u8]) -> Vec<u16> {
    data.chunks_exact(2)
        .map(|p| u16::from_be_bytes([p[0], p[1]]))
        .collect()
}

/// Unpacks sub-byte grayscale rows (MSB first, rows padded to whole bytes).
fn unpack_bits(raw: &RawPng, bits: usize) -> Vec<u8> {
    let per_byte = 8 / bits;
    let stride = raw.width.div_ceil(per_byte);
    let mut out = Vec::with_capacity(raw.width * raw.height);
    for v in 0..raw.height {
        let row = &raw.data[v * stride..(v + 1) * stride];
        for u in 0..raw.width {
            let byte = row[u / per_byte];
            let shift = 8 - bits - (u % per_byte) * bits;
            out.push((byte >> shift) & ((1 << bits) - 1) as u8);
        }
    }
    out
}

/// Decodes an 8-bit grayscale or RGB PNG into an image with samples in
/// `[0, 1]`.
pub fn image_from_png(bytes: &[u8]) -> Result<Image> {
    let raw = decode(bytes)?;
    let channels = match (raw.color, raw.depth) {
        (png::ColorType::Grayscale, png::BitDepth::Eight) => 1,
        (png::ColorType::Rgb, png::BitDepth::Eight) => 3,
        (c, d) => {
            return Err(CliError::decode(format!(
                "expected an 8-bit grayscale or RGB png, got {c:?} at {d:?} bits"
            )))
        }
    };
    let samples: Vec<f32> = raw.data.iter().map(|&b| b as f32 / 255.0).collect();
    Ok(Image::new(raw.width, raw.height, channels, samples)?)
}

/// Encodes an image (1 or 3 channels) as an 8-bit PNG, rounding each sample
/// to the nearest of the 256 levels.
pub fn image_to_png(img: &Image) -> Result<Vec<u8>> {
    let color = match img.channels() {
        1 => png::ColorType::Grayscale,
        3 => png::ColorType::Rgb,
        c => return Err(CliError::usage(format!("cannot encode a {c}-channel image as png"))),
    };
    let data: Vec<u8> = img
        .samples()
        .iter()
        .map(|&s| (s.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    encode(img.width(), img.height(), color, png::BitDepth::Eight, &data)
}

/// Decodes a single-channel 16-bit PNG as a disparity map: value = raw/256,
/// raw 0 = invalid pixel.
pub fn disparity_from_png16(bytes: &[u8]) -> Result<DisparityMap> {
    let raw = decode(bytes)?;
    if raw.color != png::ColorType::Grayscale || raw.depth != png::BitDepth::Sixteen {
        return Err(CliError::decode(format!(
            "expected a single-channel 16-bit png, got {:?} at {:?} bits",
            raw.color, raw.depth
        )));
    }
    let samples = be_u16_samples(&raw.data);
    let mut values = Vec::with_capacity(samples.len());
    let mut valid = Vec::with_capacity(samples.len());
    for s in samples {
        values.push(s as f32 / 256.0);
        valid.push(s != 0);
    }
    Ok(DisparityMap::new(raw.width, raw.height, values, valid)?)
}

/// Encodes a disparity map as a 16-bit PNG (raw = round(value·256), invalid
/// pixels as the 0 sentinel). Decoding the result reproduces the map, and
/// for maps that came from `disparity_from_png16` the raw samples round-trip
/// bit-exactly.
pub fn disparity_to_png16(disp: &DisparityMap) -> Result<Vec<u8>> {
    let mut data = Vec::with_capacity(disp.values().len() * 2);
    for (value, ok) in disp.values().iter().zip(disp.validity()) {
        let raw = if *ok {
            let scaled = (f64::from(*value) * 256.0).round();
            if scaled > f64::from(u16::MAX) {
                return Err(CliError::usage(format!(
                    "disparity {value} does not fit the 16-bit x256 encoding"
                )));
            }
            scaled as u16
        } else {
            0
        };
        data.extend_from_slice(&raw.to_be_bytes());
    }
    encode(
        disp.width(),
        disp.height(),
        png::ColorType::Grayscale,
        png::BitDepth::Sixteen,
        &data,
    )
}

/// Decodes an 8- or 16-bit grayscale PNG as a probability map scaled to
/// `[0, 1]`.
pub fn probability_from_png(bytes: &[u8]) -> Result<ProbabilityMap> {
    let raw = decode(bytes)?;
    let probs: Vec<f64> = match (raw.color, raw.depth) {
        (png::ColorType::Grayscale, png::BitDepth::Eight) => {
            raw.data.iter().map(|&b| b as f64 / 255.0).collect()
        }
        (png::ColorType::Grayscale, png::BitDepth::Sixteen) => be_u16_samples(&raw.data)
            .into_iter()
            .map(|s| s as f64 / 65535.0)
            .collect(),
        (c, d) => {
            return Err(CliError::decode(format!(
                "expected an 8- or 16-bit grayscale png, got {c:?} at {d:?} bits"
            )))
        }
    };
    Ok(ProbabilityMap::new(raw.width, raw.height, probs)?)
}

/// Decodes a grayscale PNG (depth 1, 8, or 16) as a binary mask; a pixel is
/// set when its sample exceeds half the depth's range.
pub fn mask_from_png(bytes: &[u8]) -> Result<BinaryMask> {
    let raw = decode(bytes)?;
    if raw.color != png::ColorType::Grayscale {
        return Err(CliError::decode(format!(
            "expected a grayscale mask png, got {:?}",
            raw.color
        )));
    }
    let bits: Vec<bool> = match raw.depth {
        png::BitDepth::One => unpack_bits(&raw, 1).into_iter().map(|b| b == 1).collect(),
        png::BitDepth::Eight => raw.data.iter().map(|&b| b > 127).collect(),
        png::BitDepth::Sixteen => be_u16_samples(&raw.data)
            .into_iter()
            .map(|s| s > 32767)
            .collect(),
        d => {
            return Err(CliError::decode(format!(
                "unsupported mask bit depth {d:?} (use 1, 8, or 16)"
            )))
        }
    };
    Ok(BinaryMask::new(raw.width, raw.height, bits)?)
}

/// Ground truth decoded from either encoding the tool accepts.
pub enum GroundTruth {
    /// Grayscale mask: road where the sample exceeds half range; every
    /// pixel counts as valid.
    Gray(BinaryMask),
    /// Color-coded ground truth (8-bit RGB): road where red and blue both
    /// exceed half range, valid where red does.
    Color { road: BinaryMask, valid: BinaryMask },
}

/// Decodes a ground-truth PNG, dispatching on its color type.
pub fn ground_truth_from_png(bytes: &[u8]) -> Result<GroundTruth> {
    let raw = decode(bytes)?;
    match raw.color {
        png::ColorType::Grayscale => Ok(GroundTruth::Gray(mask_from_png(bytes)?)),
        png::ColorType::Rgb => {
            let img = image_from_png(bytes)?;
            let (road, valid) = ptroad_core::kitti_masks_from_rgb(&img)?;
            Ok(GroundTruth::Color { road, valid })
        }
        c => Err(CliError::decode(format!(
            "expected a grayscale or RGB ground-truth png, got {c:?}"
        ))),
    }
}

/// Encodes a binary mask as a 1-bit grayscale PNG (set = white).
pub fn mask_to_png1(mask: &BinaryMask) -> Result<Vec<u8>> {
    let stride = mask.width().div_ceil(8);
    let mut data = vec![0u8; stride * mask.height()];
    for v in 0..mask.height() {
        for u in 0..mask.width() {
            if mask.get(u, v) {
                data[v * stride + u / 8] |= 0x80 >> (u % 8);
            }
        }
    }
    encode(
        mask.width(),
        mask.height(),
        png::ColorType::Grayscale,
        png::BitDepth::One,
        &data,
    )
}

/// Renders nonnegative reals as an 8-bit grayscale PNG scaled by 255/max
/// (an all-zero grid renders as all-zero pixels).
pub fn gray_rendering_to_png(width: usize, height: usize, cells: &[f64]) -> Result<Vec<u8>> {
    if cells.len() != width * height {
        return Err(CliError::usage(format!(
            "rendering needs {}x{} = {} cells, got {}",
            width,
            height,
            width * height,
            cells.len()
        )));
    }
    let max = cells.iter().cloned().fold(0.0f64, f64::max);
    let data: Vec<u8> = if max > 0.0 {
        cells.iter().map(|&c| (c * 255.0 / max).round() as u8).collect()
    } else {
        vec![0u8; cells.len()]
    };
    encode(width, height, png::ColorType::Grayscale, png::BitDepth::Eight, &data)
}

fn encode(
    width: usize,
    height: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    data: &[u8],
) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, width as u32, height as u32);
        encoder.set_color(color);
        encoder.set_depth(depth);
        let mut writer = encoder.write_header()?;
        writer.write_image_data(data)?;
    }
    Ok(out)
}
