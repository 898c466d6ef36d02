//! Road-segmentation evaluation: confusion counting, point metrics, and a
//! threshold sweep producing MaxF and average precision.
//!
//! Everything counts in perspective image space over the pixels a validity
//! mask admits. The false-negative rate is computed as `1 - recall`, which
//! both matches its definition on the same denominator and keeps the
//! identity `fnr + rec == 1` bit-exact.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BinaryMask, Image, ProbabilityMap};

/// Pixel-level confusion counts. Always sums to the number of evaluated
/// pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Counts agreement between a predicted mask and ground truth over the
/// pixels where `valid` is true (all pixels when `valid` is `None`).
pub fn confusion(
    pred: &BinaryMask,
    gt: &BinaryMask,
    valid: Option<&BinaryMask>,
) -> Result<ConfusionCounts> {
    let same = |m: &BinaryMask| m.width() == pred.width() && m.height() == pred.height();
    if !same(gt) || valid.is_some_and(|m| !same(m)) {
        return Err(Error::Shape(format!(
            "mask grids disagree: pred {}x{}, gt {}x{}",
            pred.height(),
            pred.width(),
            gt.height(),
            gt.width()
        )));
    }
    let mut c = ConfusionCounts { tp: 0, fp: 0, tn: 0, fn_: 0 };
    for i in 0..pred.entries().len() {
        if valid.is_some_and(|m| !m.entries()[i]) {
            continue;
        }
        match (pred.entries()[i], gt.entries()[i]) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Point metrics of one confusion table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMetrics {
    pub pre: f64,
    pub rec: f64,
    pub fpr: f64,
    pub fnr: f64,
    pub f1: f64,
}

/// Precision, recall, false positive/negative rates, and F1, with every 0/0
/// ratio defined as 0. `fnr` is `1 - rec` on a nonempty positive class (the
/// two share the denominator `tp + fn`), keeping `fnr + rec` exactly 1.
pub fn point_metrics(c: &ConfusionCounts) -> PointMetrics {
    let pre = ratio(c.tp, c.tp + c.fp);
    let rec = ratio(c.tp, c.tp + c.fn_);
    let fpr = ratio(c.fp, c.fp + c.tn);
    let fnr = if c.tp + c.fn_ == 0 { 0.0 } else { 1.0 - rec };
    let f1 = if pre + rec == 0.0 { 0.0 } else { 2.0 * pre * rec / (pre + rec) };
    PointMetrics { pre, rec, fpr, fnr, f1 }
}

/// Summary of a threshold sweep. `ap_points` documents the averaged-
/// precision variant (101-point interpolation) so reports stay comparable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub maxf: f64,
    pub ap: f64,
    pub pre: f64,
    pub rec: f64,
    pub fpr: f64,
    pub fnr: f64,
    pub threshold_at_maxf: f64,
    pub n_thresholds: usize,
    pub ap_points: usize,
}

/// One evaluated threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub pre: f64,
    pub rec: f64,
    pub fpr: f64,
    pub fnr: f64,
    pub f1: f64,
}

/// Report plus the full curve it was summarized from.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub report: MetricReport,
    pub curve: Vec<SweepPoint>,
}

impl SweepResult {
    /// CSV of the curve (threshold, pre, rec, f1 per line), for plotting.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("threshold,pre,rec,f1\n");
        for p in &self.curve {
            out.push_str(&format!("{},{},{},{}\n", p.threshold, p.pre, p.rec, p.f1));
        }
        out
    }
}

/// Evaluates the mask `prob > t` against `gt` at `n_thresholds` evenly
/// spaced thresholds `t_k = k / (n_thresholds - 1)` and summarizes:
///
/// * `maxf`: largest F1 over the sweep, smallest threshold on ties;
/// * point metrics at that threshold;
/// * `ap`: mean over recall levels `0.00, 0.01, ..., 1.00` of the best
///   precision among thresholds whose recall reaches the level (0 when none
///   does).
///
/// Ground truth with no positive pixel under `valid` has no defined recall
/// and is rejected.
pub fn sweep(
    prob: &ProbabilityMap,
    gt: &BinaryMask,
    valid: Option<&BinaryMask>,
    n_thresholds: usize,
) -> Result<SweepResult> {
    if n_thresholds < 2 {
        return Err(Error::Parameter(format!(
            "a sweep needs at least 2 thresholds, got {n_thresholds}"
        )));
    }
    let same = |h: usize, w: usize| h == prob.height() && w == prob.width();
    if !same(gt.height(), gt.width())
        || valid.is_some_and(|m| !same(m.height(), m.width()))
    {
        return Err(Error::Shape(format!(
            "probability map is {}x{}, ground truth {}x{}",
            prob.height(),
            prob.width(),
            gt.height(),
            gt.width()
        )));
    }

    // Flatten the evaluated pixels once; every threshold recounts them.
    let mut pixels: Vec<(f64, bool)> = Vec::new();
    let mut positives = 0u64;
    for i in 0..prob.entries().len() {
        if valid.is_some_and(|m| !m.entries()[i]) {
            continue;
        }
        let g = gt.entries()[i];
        positives += g as u64;
        pixels.push((prob.entries()[i], g));
    }
    if positives == 0 {
        return Err(Error::UndefinedRecall);
    }

    let mut curve = Vec::with_capacity(n_thresholds);
    for k in 0..n_thresholds {
        let t = k as f64 / (n_thresholds - 1) as f64;
        let mut c = ConfusionCounts { tp: 0, fp: 0, tn: 0, fn_: 0 };
        for &(p, g) in &pixels {
            match (p > t, g) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        let m = point_metrics(&c);
        curve.push(SweepPoint {
            threshold: t,
            pre: m.pre,
            rec: m.rec,
            fpr: m.fpr,
            fnr: m.fnr,
            f1: m.f1,
        });
    }

    let mut best = 0usize;
    for (k, p) in curve.iter().enumerate() {
        if p.f1 > curve[best].f1 {
            best = k;
        }
    }

    const AP_POINTS: usize = 101;
    let mut ap = 0.0f64;
    for i in 0..AP_POINTS {
        let level = i as f64 / 100.0;
        let best_pre = curve
            .iter()
            .filter(|p| p.rec >= level)
            .map(|p| p.pre)
            .fold(0.0f64, f64::max);
        ap += best_pre;
    }
    ap /= AP_POINTS as f64;

    let at = curve[best];
    Ok(SweepResult {
        report: MetricReport {
            maxf: at.f1,
            ap,
            pre: at.pre,
            rec: at.rec,
            fpr: at.fpr,
            fnr: at.fnr,
            threshold_at_maxf: at.threshold,
            n_thresholds,
            ap_points: AP_POINTS,
        },
        curve,
    })
}

/// Splits a color ground-truth image into (road, valid) masks using the
/// KITTI encoding: road pixels are magenta (red and blue high), pixels with
/// red low are excluded from evaluation. On [0, 1] samples the cut sits at
/// 0.5, which separates the 8-bit levels 127 and 128 on either side.
pub fn kitti_masks_from_rgb(gt: &Image) -> Result<(BinaryMask, BinaryMask)> {
    if gt.channels() != 3 {
        return Err(Error::Shape(format!(
            "color ground truth needs 3 channels, got {}",
            gt.channels()
        )));
    }
    let (w, h) = (gt.width(), gt.height());
    let mut road = Vec::with_capacity(w * h);
    let mut valid = Vec::with_capacity(w * h);
    for v in 0..h {
        for u in 0..w {
            let r = gt.sample(u, v, 0) > 0.5;
            let b = gt.sample(u, v, 2) > 0.5;
            road.push(r && b);
            valid.push(r);
        }
    }
    Ok((BinaryMask::new(w, h, road)?, BinaryMask::new(w, h, valid)?))
}
