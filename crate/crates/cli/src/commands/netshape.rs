//! `netshape`: trace the segmentation network's layer shapes for an input
//! size; prints an aligned table and optionally writes the trace as JSON.

use crate::error::Result;
use crate::files;
use ptroad_core::{trace_shapes, ArchitectureSpec};
use std::path::Path;

pub fn run(height: usize, width: usize, json: Option<&Path>) -> Result<()> {
    let arch = ArchitectureSpec::pt_resnet();
    let trace = trace_shapes(&arch, height, width, arch.input_channels)?;
    println!("{trace}");
    if let Some(path) = json {
        files::write_json(path, &trace)?;
    }
    Ok(())
}
