//! Declarative shape model of the segmentation network the 7-plane tensors
//! feed: a 4-block residual encoder, a 5-branch multi-scale head, and a
//! skip-connected decoder that restores the input resolution.
//!
//! Only dimensions are modeled — no weights, no forward pass. The value of
//! the module is that the documented topology invariants (block count,
//! strides, branch rates, skip source) are machine-checked and every stage's
//! extent is derivable for any input size.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BinaryMask, ProbabilityMap};

/// Layer vocabulary of the topology description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    AtrousConv,
    Conv1x1,
    GlobalAvgPool,
    Concat,
    ResidualAdd,
    Upsample,
    BatchNorm,
    Relu,
}

/// One layer's shape-relevant parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub kind: LayerKind,
    /// Kernel extent in pixels (odd for convolutions so symmetric padding
    /// exists).
    pub kernel: usize,
    pub stride: usize,
    /// Dilation rate; 1 means a dense kernel.
    pub rate: usize,
    pub out_channels: usize,
}

impl LayerSpec {
    pub fn atrous(kernel: usize, stride: usize, rate: usize, out_channels: usize) -> Self {
        Self { kind: LayerKind::AtrousConv, kernel, stride, rate, out_channels }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stride < 1 || self.rate < 1 || self.kernel < 1 {
            return Err(Error::Parameter(format!(
                "layer kernel/stride/rate must be >= 1, got {}/{}/{}",
                self.kernel, self.stride, self.rate
            )));
        }
        if self.kind == LayerKind::Conv1x1 && (self.kernel != 1 || self.rate != 1) {
            return Err(Error::Parameter(
                "a 1x1 convolution must have kernel 1 and rate 1".into(),
            ));
        }
        if self.kind == LayerKind::AtrousConv && self.kernel.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "atrous kernels must be odd so same-padding exists, got {}",
                self.kernel
            )));
        }
        Ok(())
    }
}

/// One encoder block: batch norm and ReLU feeding a stride-2 atrous
/// convolution, with the block input added back through a projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderBlockSpec {
    pub conv: LayerSpec,
    pub residual_add: bool,
}

impl EncoderBlockSpec {
    pub fn stride(&self) -> usize {
        self.conv.stride
    }

    pub fn out_channels(&self) -> usize {
        self.conv.out_channels
    }
}

/// One branch of the multi-scale head, applied to the block-4 features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    /// Global average pool to 1x1, project, broadcast back.
    GlobalPool,
    /// 3x3 dilated convolution, extent-preserving.
    Atrous { rate: usize },
    /// Plain 1x1 convolution.
    Conv1x1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchSpec {
    pub kind: BranchKind,
    pub out_channels: usize,
}

/// Full topology description. [`ArchitectureSpec::pt_resnet`] builds the
/// canonical instance; [`ArchitectureSpec::validate`] pins its documented
/// invariants so mutated variants are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureSpec {
    pub input_channels: usize,
    pub encoder_blocks: Vec<EncoderBlockSpec>,
    pub branches: Vec<BranchSpec>,
    /// Channels after the 1x1 compression of the concatenated branches.
    pub compress_channels: usize,
    /// 1-based index of the encoder block whose output the decoder reuses.
    pub skip_block: usize,
    /// Annotation carried through from the training recipe (a keep
    /// probability); nothing dimensional depends on it.
    pub relu_parameter: f64,
}

impl ArchitectureSpec {
    /// The canonical topology: 7 input channels, four stride-2 residual
    /// blocks at 64/128/256/512 channels, a five-branch head (global pool,
    /// dilation rates 4/8/16, 1x1) at 256 channels each, 1x1 compression to
    /// 256, and a decoder that concatenates the block-2 skip and upsamples
    /// back to the input extent.
    pub fn pt_resnet() -> Self {
        let channels = [64usize, 128, 256, 512];
        Self {
            input_channels: 7,
            encoder_blocks: channels
                .iter()
                .map(|&c| EncoderBlockSpec { conv: LayerSpec::atrous(3, 2, 1, c), residual_add: true })
                .collect(),
            branches: alloc::vec![
                BranchSpec { kind: BranchKind::GlobalPool, out_channels: 256 },
                BranchSpec { kind: BranchKind::Atrous { rate: 4 }, out_channels: 256 },
                BranchSpec { kind: BranchKind::Atrous { rate: 8 }, out_channels: 256 },
                BranchSpec { kind: BranchKind::Atrous { rate: 16 }, out_channels: 256 },
                BranchSpec { kind: BranchKind::Conv1x1, out_channels: 256 },
            ],
            compress_channels: 256,
            skip_block: 2,
            relu_parameter: 0.5,
        }
    }

    /// Dilation rates of the atrous branches, in branch order.
    pub fn branch_rates(&self) -> Vec<usize> {
        self.branches
            .iter()
            .filter_map(|b| match b.kind {
                BranchKind::Atrous { rate } => Some(rate),
                _ => None,
            })
            .collect()
    }

    /// Enforces the structural contract: exactly 4 encoder blocks, each a
    /// stride-2 residual atrous block; exactly 5 head branches with one
    /// global pool, one 1x1, and dilation rates (4, 8, 16); decoder skip
    /// from block 2.
    pub fn validate(&self) -> Result<()> {
        if self.input_channels < 1 {
            return Err(Error::Parameter("input_channels must be >= 1".into()));
        }
        if self.encoder_blocks.len() != 4 {
            return Err(Error::Parameter(format!(
                "topology requires exactly 4 encoder blocks, got {}",
                self.encoder_blocks.len()
            )));
        }
        for (i, b) in self.encoder_blocks.iter().enumerate() {
            b.conv.validate()?;
            if b.conv.kind != LayerKind::AtrousConv {
                return Err(Error::Parameter(format!(
                    "encoder block {} must be built on an atrous convolution",
                    i + 1
                )));
            }
            if b.stride() != 2 {
                return Err(Error::Parameter(format!(
                    "encoder block {} must have stride 2, got {}",
                    i + 1,
                    b.stride()
                )));
            }
            if !b.residual_add {
                return Err(Error::Parameter(format!(
                    "encoder block {} must carry a residual add",
                    i + 1
                )));
            }
            if b.out_channels() < 1 {
                return Err(Error::Parameter(format!(
                    "encoder block {} must produce at least one channel",
                    i + 1
                )));
            }
        }
        if self.branches.len() != 5 {
            return Err(Error::Parameter(format!(
                "head requires exactly 5 branches, got {}",
                self.branches.len()
            )));
        }
        let pools = self
            .branches
            .iter()
            .filter(|b| b.kind == BranchKind::GlobalPool)
            .count();
        let ones = self
            .branches
            .iter()
            .filter(|b| b.kind == BranchKind::Conv1x1)
            .count();
        if pools != 1 || ones != 1 {
            return Err(Error::Parameter(format!(
                "head requires one global-pool branch and one 1x1 branch, got {pools} and {ones}"
            )));
        }
        if self.branch_rates() != [4, 8, 16] {
            return Err(Error::Parameter(format!(
                "atrous branch rates must be (4, 8, 16), got {:?}",
                self.branch_rates()
            )));
        }
        if self.branches.iter().any(|b| b.out_channels < 1) {
            return Err(Error::Parameter("every branch must produce channels".into()));
        }
        if self.compress_channels < 1 {
            return Err(Error::Parameter("compress_channels must be >= 1".into()));
        }
        if self.skip_block != 2 {
            return Err(Error::Parameter(format!(
                "decoder skip must come from encoder block 2, got {}",
                self.skip_block
            )));
        }
        if !self.relu_parameter.is_finite() || !(0.0..=1.0).contains(&self.relu_parameter) {
            return Err(Error::Parameter(format!(
                "relu_parameter must lie in [0, 1], got {}",
                self.relu_parameter
            )));
        }
        Ok(())
    }
}

/// Output extent of a (dilated) convolution along one axis:
/// `floor((in + 2 padding - rate (kernel - 1) - 1) / stride) + 1`.
/// The effective window must fit inside the padded input.
pub fn conv_out_extent(
    in_extent: usize,
    kernel: usize,
    stride: usize,
    rate: usize,
    padding: usize,
) -> Result<usize> {
    if in_extent < 1 || kernel < 1 || stride < 1 || rate < 1 {
        return Err(Error::Parameter(format!(
            "extent/kernel/stride/rate must be >= 1, got {in_extent}/{kernel}/{stride}/{rate}"
        )));
    }
    let effective = rate * (kernel - 1) + 1;
    let padded = in_extent + 2 * padding;
    if padded < effective {
        return Err(Error::Shape(format!(
            "window of effective extent {effective} exceeds padded input {padded}"
        )));
    }
    Ok((padded - effective) / stride + 1)
}

/// One traced stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStage {
    pub name: String,
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

/// Per-stage dimensions of a full pass, encoder input through probability
/// output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeTrace {
    pub stages: Vec<TraceStage>,
}

impl ShapeTrace {
    pub fn final_stage(&self) -> &TraceStage {
        self.stages.last().expect("a trace always has stages")
    }

    pub fn stage(&self, name: &str) -> Option<&TraceStage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

impl core::fmt::Display for ShapeTrace {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "{:<26} {:>6} {:>6} {:>9}", "stage", "height", "width", "channels")?;
        for s in &self.stages {
            writeln!(f, "{:<26} {:>6} {:>6} {:>9}", s.name, s.height, s.width, s.channels)?;
        }
        Ok(())
    }
}

fn stage(name: String, height: usize, width: usize, channels: usize) -> TraceStage {
    TraceStage { name, height, width, channels }
}

/// Walks an input of `height x width x channels` through the validated
/// topology and records every stage's dimensions.
///
/// With symmetric same-padding, each stride-2 block halves extents rounding
/// up, so block 4 sits at `(ceil(H/16), ceil(W/16))` — 1/256 of the input
/// area whenever both extents divide by 16. The decoder ends at the input
/// extent with a single probability channel.
pub fn trace_shapes(
    spec: &ArchitectureSpec,
    height: usize,
    width: usize,
    channels: usize,
) -> Result<ShapeTrace> {
    spec.validate()?;
    if channels != spec.input_channels {
        return Err(Error::Shape(format!(
            "input has {channels} channels, topology expects {}",
            spec.input_channels
        )));
    }
    if height < 16 || width < 16 {
        return Err(Error::Parameter(format!(
            "input extents must be at least 16, got {height}x{width}"
        )));
    }

    let mut stages = Vec::new();
    stages.push(stage("input".into(), height, width, channels));

    let (mut h, mut w) = (height, width);
    let mut skip_dims = None;
    for (i, b) in spec.encoder_blocks.iter().enumerate() {
        let name = format!("block{}", i + 1);
        let pad = b.conv.rate * (b.conv.kernel - 1) / 2;
        h = conv_out_extent(h, b.conv.kernel, b.conv.stride, b.conv.rate, pad)
            .map_err(|_| Error::Shape(format!("stage {name} collapses to zero extent")))?;
        w = conv_out_extent(w, b.conv.kernel, b.conv.stride, b.conv.rate, pad)
            .map_err(|_| Error::Shape(format!("stage {name} collapses to zero extent")))?;
        stages.push(stage(name, h, w, b.out_channels()));
        if i + 1 == spec.skip_block {
            skip_dims = Some((h, w, b.out_channels()));
        }
    }
    if h != height.div_ceil(16) || w != width.div_ceil(16) {
        return Err(Error::Shape(format!(
            "encoder ended at {h}x{w}, expected {}x{}",
            height.div_ceil(16),
            width.div_ceil(16)
        )));
    }
    let (skip_h, skip_w, skip_c) = skip_dims.expect("skip block index is validated");

    let mut concat_channels = 0;
    for (i, b) in spec.branches.iter().enumerate() {
        let n = i + 1;
        match b.kind {
            BranchKind::GlobalPool => {
                stages.push(stage(format!("branch{n}_pool"), 1, 1, b.out_channels));
                stages.push(stage(format!("branch{n}_broadcast"), h, w, b.out_channels));
            }
            BranchKind::Atrous { rate } => {
                let bh = conv_out_extent(h, 3, 1, rate, rate)?;
                let bw = conv_out_extent(w, 3, 1, rate, rate)?;
                stages.push(stage(format!("branch{n}_atrous_r{rate}"), bh, bw, b.out_channels));
            }
            BranchKind::Conv1x1 => {
                stages.push(stage(format!("branch{n}_conv1x1"), h, w, b.out_channels));
            }
        }
        concat_channels += b.out_channels;
    }
    stages.push(stage("head_concat".into(), h, w, concat_channels));
    stages.push(stage("head_compress".into(), h, w, spec.compress_channels));

    stages.push(stage("decoder_upsample_to_skip".into(), skip_h, skip_w, spec.compress_channels));
    stages.push(stage(
        "decoder_concat_skip".into(),
        skip_h,
        skip_w,
        spec.compress_channels + skip_c,
    ));
    stages.push(stage(
        "decoder_upsample_to_input".into(),
        height,
        width,
        spec.compress_channels + skip_c,
    ));
    stages.push(stage("probability".into(), height, width, 1));

    Ok(ShapeTrace { stages })
}

/// Binary road mask from a probability map: true exactly where the
/// probability is strictly greater than `t`. `t` must lie in `[0, 1]`.
pub fn threshold_probability(p: &ProbabilityMap, t: f64) -> Result<BinaryMask> {
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(Error::Parameter(format!("threshold must lie in [0, 1], got {t}")));
    }
    let data = p.entries().iter().map(|&v| v > t).collect();
    BinaryMask::new(p.width(), p.height(), data)
}
