//! Core primitives for stereo road-scene preprocessing: v-disparity
//! construction, minimum-energy road-profile extraction, planar road-model
//! fitting, right-to-left perspective alignment, 7-plane tensor assembly,
//! segmentation metrics, a network shape contract, and a synthetic scene
//! oracle.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the CLI
//! live in the companion `ptroad` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod evalroad;
mod fmath;
pub mod image;
pub mod netshape;
pub mod roadfit;
pub mod synthgen;
pub mod tensor7;
pub mod vdisp;
pub mod warp;

pub use error::{Error, Result};
pub use evalroad::{
    confusion, kitti_masks_from_rgb, point_metrics, sweep, ConfusionCounts, MetricReport,
    PointMetrics, SweepPoint, SweepResult,
};
pub use image::{BinaryMask, DisparityMap, Image, ProbabilityMap};
pub use netshape::{
    conv_out_extent, threshold_probability, trace_shapes, ArchitectureSpec, BranchKind,
    BranchSpec, EncoderBlockSpec, LayerKind, LayerSpec, ShapeTrace, TraceStage,
};
pub use roadfit::{
    dp_solve, extract_path, fit_linear, fit_road, fit_road_from_vdisparity, vanishing_row,
    DPConfig, DPEnergyTable, LineFit, PathPoint, RoadModel, RoadModelRecord, RoadPath,
};
pub use synthgen::{generate, Obstacle, Scene, SceneParams};
pub use tensor7::{assemble, read_pt7, write_pt7, Tensor7};
pub use vdisp::{build_vdisparity, VDisparityMap};
pub use warp::{transform_right_to_left, CropAboveHorizon, WarpedImage};
