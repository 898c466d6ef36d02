//! One module per subcommand; each exposes a `run` function taking resolved
//! paths and configuration.

pub mod eval;
pub mod fit;
pub mod netshape;
pub mod pipeline;
pub mod synth;
pub mod transform;
pub mod vdisp;
