//! Road-profile extraction: minimum-energy path search over a v-disparity
//! map, weighted linear fit of the profile, and the resulting road model.
//!
//! The search assigns one row to every disparity bin. Stepping from bin `d`
//! to bin `d + 1` moves the row index up by `tau in [0, tau_max]`, and each
//! step pays `smoothness_sign * lambda * tau` on top of the data term
//! `-count(d, v)`. A road surface (disparity growing toward the image
//! bottom) therefore matches this recurrence on the row-mirrored map; the
//! [`fit_road`] composite performs that mirroring internally.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmath;
use crate::image::DisparityMap;
use crate::vdisp::{build_vdisparity, VDisparityMap};

/// Parameters of the profile search and fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DPConfig {
    /// Per-row cost of moving the path between adjacent disparity bins.
    pub lambda: f64,
    /// Largest row jump allowed between adjacent bins. Must stay below the
    /// map height and at or above `1 / alpha1` for the shallowest road slope
    /// the caller expects, or the path cannot track the profile.
    pub tau_max: usize,
    /// `+1` makes `lambda * tau` a penalty (smooth paths win); `-1` keeps
    /// the raw formulation in which jumps are rewarded instead.
    pub smoothness_sign: i8,
    /// Minimum histogram mass a path cell needs to take part in the fit.
    pub min_support: f64,
}

impl Default for DPConfig {
    fn default() -> Self {
        Self { lambda: 0.02, tau_max: 12, smoothness_sign: 1, min_support: 0.02 }
    }
}

impl DPConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Parameter(format!(
                "lambda must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        if self.smoothness_sign != 1 && self.smoothness_sign != -1 {
            return Err(Error::Parameter(format!(
                "smoothness_sign must be +1 or -1, got {}",
                self.smoothness_sign
            )));
        }
        if !self.min_support.is_finite() || self.min_support < 0.0 {
            return Err(Error::Parameter(format!(
                "min_support must be finite and non-negative, got {}",
                self.min_support
            )));
        }
        Ok(())
    }
}

/// Filled-in energy table of the path search.
///
/// For every cell with `d < d_max`:
/// `energy(d, v) = -count(d, v) + min over feasible tau of
/// [energy(d + 1, v - tau) + smoothness_sign * lambda * tau]`,
/// with `tau` feasible when `v - tau >= 0`. The base row is
/// `energy(d_max, v) = -count(d_max, v)`. Ties pick the smallest `tau`.
#[derive(Debug, Clone)]
pub struct DPEnergyTable {
    d_bins: usize,
    height: usize,
    energy: Vec<f64>,
    best_tau: Vec<usize>,
}

impl DPEnergyTable {
    pub fn d_bins(&self) -> usize {
        self.d_bins
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn energy(&self, d: usize, v: usize) -> f64 {
        self.energy[d * self.height + v]
    }

    /// The `tau` chosen for the transition from bin `d` to bin `d + 1`.
    /// Meaningless (always 0) on the base row.
    #[inline]
    pub fn best_tau(&self, d: usize, v: usize) -> usize {
        self.best_tau[d * self.height + v]
    }
}

/// One cell of the extracted profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    /// Disparity bin.
    pub bin: usize,
    /// Row index in the map the path was extracted from.
    pub row: usize,
    /// Histogram mass at the cell; doubles as the fit weight.
    pub weight: f64,
}

/// Extracted profile, one point per disparity bin, listed from the last bin
/// down to bin 0. Consecutive rows differ by at most `tau_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadPath {
    pub points: Vec<PathPoint>,
}

impl RoadPath {
    /// Re-sums the path objective: `sum(-weight) + smoothness_sign * lambda *
    /// sum(|row step|)`. Equals the terminal energy of the table the path
    /// was extracted from (up to float associativity).
    pub fn energy(&self, cfg: &DPConfig) -> f64 {
        let mut total = 0.0;
        for p in &self.points {
            total -= p.weight;
        }
        let lambda = cfg.lambda * cfg.smoothness_sign as f64;
        for pair in self.points.windows(2) {
            let step = pair[0].row.abs_diff(pair[1].row) as f64;
            total += lambda * step;
        }
        total
    }

    /// Same path with rows mirrored around the map midline
    /// (`row -> height - 1 - row`).
    pub fn flip_rows(&self, height: usize) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| PathPoint { bin: p.bin, row: height - 1 - p.row, weight: p.weight })
                .collect(),
        }
    }
}

/// Fills the energy table for `vd` under `cfg`.
///
/// `vd` must be normalized (so `lambda` keeps one scale across frame sizes)
/// and taller than `tau_max`.
pub fn dp_solve(vd: &VDisparityMap, cfg: &DPConfig) -> Result<DPEnergyTable> {
    cfg.validate()?;
    if !vd.is_normalized() {
        return Err(Error::Parameter(
            "profile search requires a normalized v-disparity map".into(),
        ));
    }
    let height = vd.height();
    let d_bins = vd.d_bins();
    if height <= cfg.tau_max {
        return Err(Error::Parameter(format!(
            "tau_max = {} must be smaller than the map height {}",
            cfg.tau_max, height
        )));
    }

    let mut energy = vec![0.0f64; d_bins * height];
    let mut best_tau = vec![0usize; d_bins * height];
    let signed_lambda = cfg.lambda * cfg.smoothness_sign as f64;

    let d_max = d_bins - 1;
    for v in 0..height {
        energy[d_max * height + v] = -vd.count(d_max, v);
    }
    for d in (0..d_max).rev() {
        for v in 0..height {
            let mut best = f64::INFINITY;
            let mut best_t = 0usize;
            for tau in 0..=cfg.tau_max.min(v) {
                let cand = energy[(d + 1) * height + (v - tau)] + signed_lambda * tau as f64;
                if cand < best {
                    best = cand;
                    best_t = tau;
                }
            }
            energy[d * height + v] = -vd.count(d, v) + best;
            best_tau[d * height + v] = best_t;
        }
    }
    Ok(DPEnergyTable { d_bins, height, energy, best_tau })
}

/// Walks the filled table back into a profile.
///
/// The terminal cell minimizes `energy(0, v)` (smallest `v` on ties); the
/// stored `tau` choices then determine one row per remaining bin. Weights
/// are copied from `vd`.
pub fn extract_path(table: &DPEnergyTable, vd: &VDisparityMap) -> Result<RoadPath> {
    if table.d_bins() != vd.d_bins() || table.height() != vd.height() {
        return Err(Error::Shape(format!(
            "energy table is {}x{}, map is {}x{}",
            table.d_bins(),
            table.height(),
            vd.d_bins(),
            vd.height()
        )));
    }
    let mut v = (0..table.height())
        .min_by(|a, b| table.energy(0, *a).total_cmp(&table.energy(0, *b)))
        .expect("height is positive");
    // total_cmp picks the first minimum only when iterating in order; make
    // the smallest-row tie rule explicit instead of relying on that.
    for cand in 0..table.height() {
        let (e_cand, e_best) = (table.energy(0, cand), table.energy(0, v));
        if e_cand < e_best || (e_cand == e_best && cand < v) {
            v = cand;
        }
    }

    let d_bins = table.d_bins();
    let mut points = Vec::with_capacity(d_bins);
    let mut row = v;
    for d in 0..d_bins {
        points.push(PathPoint { bin: d, row, weight: vd.count(d, row) });
        if d + 1 < d_bins {
            row -= table.best_tau(d, row);
        }
    }
    points.reverse();
    Ok(RoadPath { points })
}

/// Result of the weighted line fit `bin = alpha0 + alpha1 * row`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub alpha0: f64,
    pub alpha1: f64,
    /// Weighted RMS of the bin residuals at the supported points.
    pub residual: f64,
}

/// Weighted least squares over the path cells whose weight reaches
/// `min_support`, via the 2x2 normal equations.
///
/// Needs at least two supported points spanning more than one row, and the
/// recovered slope must be positive for road geometry.
pub fn fit_linear(path: &RoadPath, min_support: f64) -> Result<LineFit> {
    let mut s_w = 0.0f64;
    let mut s_v = 0.0f64;
    let mut s_vv = 0.0f64;
    let mut s_d = 0.0f64;
    let mut s_vd = 0.0f64;
    let mut supported = 0usize;
    for p in &path.points {
        if p.weight < min_support {
            continue;
        }
        supported += 1;
        let v = p.row as f64;
        let d = p.bin as f64;
        s_w += p.weight;
        s_v += p.weight * v;
        s_vv += p.weight * v * v;
        s_d += p.weight * d;
        s_vd += p.weight * v * d;
    }
    if supported < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 supported path points, found {supported}"
        )));
    }
    let denom = s_w * s_vv - s_v * s_v;
    if denom.abs() < 1e-12 * s_w * s_vv.max(1.0) {
        return Err(Error::DegenerateFit(
            "supported points share a single row; slope is undetermined".into(),
        ));
    }
    let alpha1 = (s_w * s_vd - s_v * s_d) / denom;
    let alpha0 = (s_d - alpha1 * s_v) / s_w;
    if alpha1 <= 0.0 {
        return Err(Error::NonRoadGeometry { alpha1 });
    }

    let mut sse = 0.0f64;
    for p in &path.points {
        if p.weight < min_support {
            continue;
        }
        let r = p.bin as f64 - (alpha0 + alpha1 * p.row as f64);
        sse += p.weight * r * r;
    }
    Ok(LineFit { alpha0, alpha1, residual: fmath::sqrt(sse / s_w) })
}

/// Row where the fitted profile crosses zero disparity, rounded to the
/// nearest integer and clamped into the image: everything above it images
/// scenery beyond the road plane.
pub fn vanishing_row(alpha0: f64, alpha1: f64, height: usize) -> Result<usize> {
    if height == 0 {
        return Err(Error::Parameter("height must be positive".into()));
    }
    if alpha1 <= 0.0 || alpha1.is_nan() {
        return Err(Error::NonRoadGeometry { alpha1 });
    }
    let crossing = fmath::round(-alpha0 / alpha1);
    let clamped = crossing.clamp(0.0, (height - 1) as f64);
    Ok(clamped as usize)
}

/// Fitted planar road model: disparity `f(v) = alpha0 + alpha1 * v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadModel {
    pub alpha0: f64,
    pub alpha1: f64,
    /// Vanishing row: first image row at or below which `f` is meaningful.
    pub v_py: usize,
    /// Weighted RMS residual of the fit, 0 for exact ground truth.
    pub fit_residual: f64,
}

impl RoadModel {
    /// Expected road disparity at row `v` (may be negative above `v_py`).
    #[inline]
    pub fn f(&self, v: usize) -> f64 {
        self.alpha0 + self.alpha1 * v as f64
    }

    /// Per-row horizontal shift used by the perspective alignment:
    /// `f(v)` clamped below at zero, so rows above the horizon move by 0.
    #[inline]
    pub fn row_shift(&self, v: usize) -> f64 {
        self.f(v).max(0.0)
    }
}

/// Road model bundled with the search parameters that produced it; this is
/// the JSON document the CLI writes next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadModelRecord {
    pub alpha0: f64,
    pub alpha1: f64,
    pub v_py: usize,
    pub fit_residual: f64,
    pub lambda: f64,
    pub tau_max: usize,
    pub smoothness_sign: i8,
}

impl RoadModelRecord {
    pub fn new(model: &RoadModel, cfg: &DPConfig) -> Self {
        Self {
            alpha0: model.alpha0,
            alpha1: model.alpha1,
            v_py: model.v_py,
            fit_residual: model.fit_residual,
            lambda: cfg.lambda,
            tau_max: cfg.tau_max,
            smoothness_sign: cfg.smoothness_sign,
        }
    }

    pub fn model(&self) -> RoadModel {
        RoadModel {
            alpha0: self.alpha0,
            alpha1: self.alpha1,
            v_py: self.v_py,
            fit_residual: self.fit_residual,
        }
    }
}

/// Full road-model estimation from a normalized v-disparity map.
///
/// The map is row-mirrored so the bin-to-bin steps of the search walk the
/// road line (disparity grows downward in image coordinates), the profile
/// is extracted and mirrored back, and the supported cells are fitted.
pub fn fit_road_from_vdisparity(vd: &VDisparityMap, cfg: &DPConfig) -> Result<RoadModel> {
    let flipped = vd.flip_rows();
    let table = dp_solve(&flipped, cfg)?;
    let path = extract_path(&table, &flipped)?.flip_rows(vd.height());
    let fit = fit_linear(&path, cfg.min_support)?;
    let v_py = vanishing_row(fit.alpha0, fit.alpha1, vd.height())?;
    Ok(RoadModel { alpha0: fit.alpha0, alpha1: fit.alpha1, v_py, fit_residual: fit.residual })
}

/// Convenience composition: histograms (auto bin count, normalized), profile
/// search, and fit in one call.
pub fn fit_road(disp: &DisparityMap, cfg: &DPConfig) -> Result<RoadModel> {
    let vd = build_vdisparity(disp, None, true)?;
    fit_road_from_vdisparity(&vd, cfg)
}
