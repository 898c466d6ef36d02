//! Run configuration: defaults, JSON config file, and command-line
//! overrides (flags win over the file, the file wins over defaults).

use crate::error::{CliError, Result};
use crate::files;
use ptroad_core::DPConfig;
use std::path::PathBuf;

/// JSON config file schema. Every key is optional; unknown keys are
/// rejected so typos fail loudly.
#[derive(Debug, Clone, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    lambda: Option<f64>,
    tau_max: Option<usize>,
    smoothness_sign: Option<i8>,
    min_support: Option<f64>,
    normalize: Option<bool>,
    d_max: Option<usize>,
    n_thresholds: Option<usize>,
    threshold: Option<f64>,
}

/// Config-file and override flags shared by commands that consume the run
/// configuration.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigArgs {
    /// JSON config file; individual flags below override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Smoothness weight of the road-profile search
    #[arg(long, value_name = "REAL")]
    pub lambda: Option<f64>,

    /// Largest per-step row jump the road-profile search may take
    #[arg(long, value_name = "ROWS")]
    pub tau_max: Option<usize>,

    /// Sign of the smoothness term: +1 penalizes jumps, -1 rewards them
    #[arg(long, value_name = "SIGN", allow_hyphen_values = true)]
    pub smoothness_sign: Option<i8>,

    /// Histogram mass below which a profile point is dropped from the fit
    #[arg(long, value_name = "REAL")]
    pub min_support: Option<f64>,

    /// Divide v-disparity entries by the image width
    #[arg(long, value_name = "BOOL")]
    pub normalize: Option<bool>,

    /// Largest disparity bin; defaults to the ceiling of the largest valid
    /// disparity in the input
    #[arg(long, value_name = "BIN")]
    pub d_max: Option<usize>,

    /// Number of evenly spaced thresholds in the evaluation sweep
    #[arg(long, value_name = "N")]
    pub n_thresholds: Option<usize>,

    /// Probability threshold used when a command emits a binary mask
    #[arg(long, value_name = "REAL")]
    pub threshold: Option<f64>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dp: DPConfig,
    pub normalize: bool,
    pub d_max: Option<usize>,
    pub n_thresholds: usize,
    pub threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dp: DPConfig::default(),
            normalize: true,
            d_max: None,
            n_thresholds: 256,
            threshold: 0.9,
        }
    }
}

impl RunConfig {
    /// Builds the effective configuration: defaults, then the config file
    /// (if given), then the flags.
    pub fn resolve(args: &ConfigArgs) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &args.config {
            let bytes = files::read_bytes(path)?;
            let file: ConfigFile = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::decode(format!("invalid config json: {e}")))
                .map_err(CliError::at_path(path))?;
            cfg.apply(&file);
        }
        cfg.apply(&ConfigFile {
            lambda: args.lambda,
            tau_max: args.tau_max,
            smoothness_sign: args.smoothness_sign,
            min_support: args.min_support,
            normalize: args.normalize,
            d_max: args.d_max,
            n_thresholds: args.n_thresholds,
            threshold: args.threshold,
        });
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, file: &ConfigFile) {
        if let Some(x) = file.lambda {
            self.dp.lambda = x;
        }
        if let Some(x) = file.tau_max {
            self.dp.tau_max = x;
        }
        if let Some(x) = file.smoothness_sign {
            self.dp.smoothness_sign = x;
        }
        if let Some(x) = file.min_support {
            self.dp.min_support = x;
        }
        if let Some(x) = file.normalize {
            self.normalize = x;
        }
        if let Some(x) = file.d_max {
            self.d_max = Some(x);
        }
        if let Some(x) = file.n_thresholds {
            self.n_thresholds = x;
        }
        if let Some(x) = file.threshold {
            self.threshold = x;
        }
    }

    fn validate(&self) -> Result<()> {
        self.dp.validate()?;
        if self.n_thresholds < 2 {
            return Err(CliError::usage(format!(
                "n_thresholds must be at least 2, got {}",
                self.n_thresholds
            )));
        }
        if !self.threshold.is_finite() || !(0.0..=1.0).contains(&self.threshold) {
            return Err(CliError::usage(format!(
                "threshold must lie in [0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}
