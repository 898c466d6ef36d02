//! Path-level IO: reading inputs with path-annotated errors and atomic
//! output writes (write to a temporary sibling, then rename into place).

use crate::error::{CliError, Result};
use crate::pngio;
use ptroad_core::{BinaryMask, DisparityMap, Image, ProbabilityMap, RoadModel};
use std::io::Write;
use std::path::Path;

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Writes a file atomically: the destination either keeps its old content
/// or holds the complete new content, never a partial write.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn load_image(path: &Path) -> Result<Image> {
    pngio::image_from_png(&read_bytes(path)?).map_err(CliError::at_path(path))
}

pub fn load_disparity(path: &Path) -> Result<DisparityMap> {
    pngio::disparity_from_png16(&read_bytes(path)?).map_err(CliError::at_path(path))
}

pub fn load_probability(path: &Path) -> Result<ProbabilityMap> {
    pngio::probability_from_png(&read_bytes(path)?).map_err(CliError::at_path(path))
}

pub fn load_mask(path: &Path) -> Result<BinaryMask> {
    pngio::mask_from_png(&read_bytes(path)?).map_err(CliError::at_path(path))
}

/// Loads a road model from JSON. Accepts both the bare four-field model and
/// the extended record written by `fit` (extra keys are ignored). The model
/// must be finite with a positive slope.
pub fn load_model(path: &Path) -> Result<RoadModel> {
    let bytes = read_bytes(path)?;
    let model: RoadModel = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::decode(format!("invalid road-model json: {e}")))
        .map_err(CliError::at_path(path))?;
    if !model.alpha0.is_finite() || !model.alpha1.is_finite() || !model.fit_residual.is_finite() {
        return Err(CliError::WithPath {
            path: path.to_path_buf(),
            source: Box::new(CliError::decode("road model fields must be finite")),
        });
    }
    if model.alpha1 <= 0.0 {
        return Err(CliError::WithPath {
            path: path.to_path_buf(),
            source: Box::new(CliError::decode(format!(
                "road model slope must be positive, got {}",
                model.alpha1
            ))),
        });
    }
    Ok(model)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::decode(format!("json serialization failed: {e}")))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}
