//! Error type shared by all core modules.

use alloc::string::String;

/// Unified error for the geometry, warping, format, and evaluation primitives.
///
/// Variants map one-to-one onto the failure classes callers need to tell
/// apart (the CLI maps them to distinct exit codes).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An operation that needs data received none (no valid pixels, zero bins).
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// The line fit had too little support to determine a unique solution.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// The fitted profile slope is not consistent with a road surface
    /// (disparity must grow toward the bottom of the image).
    #[error("non-road geometry: fitted slope alpha1 = {alpha1} is not positive")]
    NonRoadGeometry { alpha1: f64 },

    /// Two buffers that must agree on dimensions do not, or a shape
    /// computation collapsed; the message names the offending stage.
    #[error("shape error: {0}")]
    Shape(String),

    /// A serialized frame is malformed; `offset` is the byte position of the
    /// first inconsistency.
    #[error("format error at byte {offset}: {what}")]
    Format { offset: usize, what: String },

    /// Scene parameters describe an impossible geometry.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Ground truth has no positive pixels under the validity mask, so recall
    /// (and everything derived from it) is undefined.
    #[error("undefined recall: ground truth has no positive pixels under the validity mask")]
    UndefinedRecall,
}

/// Convenience alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
