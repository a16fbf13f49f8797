//! Visual quality, corner-travel distance, baseline-aware stability and the
//! per-dataset aggregation of all three.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Rect;

/// `min(w, h) / max(w, h)`; 1 for a square, towards 0 for slivers.
pub fn aspect_ratio(r: &Rect) -> Result<f64> {
    if !(r.w > 0.0 && r.h > 0.0) {
        return Err(Error::Degenerate(format!("rectangle {}x{} has a zero side", r.w, r.h)));
    }
    Ok(r.w.min(r.h) / r.w.max(r.h))
}

/// Sum of the l1 displacements of the four corners (matched TL-TL, TR-TR,
/// BR-BR, BL-BL), divided by four times the root diagonal.
pub fn corner_travel(a: &Rect, b: &Rect, root: &Rect) -> f64 {
    let travel: f64 = a
        .corners()
        .iter()
        .zip(b.corners().iter())
        .map(|(p, q)| (p.0 - q.0).abs() + (p.1 - q.1).abs())
        .sum();
    travel / (4.0 * root.diagonal())
}

/// Layout change in excess of the change the data forces.
pub fn stability(d_next: f64, d_base: f64) -> f64 {
    (d_next - d_base).max(0.0)
}

/// Aggregated metric values of one time step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepMetrics {
    pub t: usize,
    pub mean_rho: f64,
    /// Transition metrics from `t` to `t + 1`; absent on the last step.
    pub mean_ct: Option<f64>,
    pub mean_ct_baseline: Option<f64>,
    pub mean_sigma: Option<f64>,
}

/// Metric record of one (dataset, algorithm) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRecord {
    pub dataset: String,
    pub algorithm: String,
    pub per_step: Vec<StepMetrics>,
    pub dataset_mean_rho: f64,
    /// `None` when the dataset has fewer than two steps.
    pub dataset_mean_sigma: Option<f64>,
    pub dataset_mean_ct: Option<f64>,
    pub dataset_mean_ct_baseline: Option<f64>,
}

/// Per-rectangle values of one transition (leaves alive at both steps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSample {
    pub ct: f64,
    pub ct_baseline: f64,
    pub sigma: f64,
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Averages per-rectangle values within each step, then over steps.
///
/// `rho[t]` holds the aspect ratios of step `t`; `transitions[t]` the samples
/// of the transition `t -> t + 1`.
pub fn aggregate(
    dataset: &str,
    algorithm: &str,
    rho: &[Vec<f64>],
    transitions: &[Vec<TransitionSample>],
) -> MetricRecord {
    let per_step: Vec<StepMetrics> = rho
        .iter()
        .enumerate()
        .map(|(t, r)| {
            let tr = transitions.get(t);
            StepMetrics {
                t,
                mean_rho: mean(r.iter().copied()).unwrap_or(0.0),
                mean_ct: tr.and_then(|s| mean(s.iter().map(|x| x.ct))),
                mean_ct_baseline: tr.and_then(|s| mean(s.iter().map(|x| x.ct_baseline))),
                mean_sigma: tr.and_then(|s| mean(s.iter().map(|x| x.sigma))),
            }
        })
        .collect();
    MetricRecord {
        dataset: dataset.to_string(),
        algorithm: algorithm.to_string(),
        dataset_mean_rho: mean(per_step.iter().map(|s| s.mean_rho)).unwrap_or(0.0),
        dataset_mean_sigma: mean(per_step.iter().filter_map(|s| s.mean_sigma)),
        dataset_mean_ct: mean(per_step.iter().filter_map(|s| s.mean_ct)),
        dataset_mean_ct_baseline: mean(per_step.iter().filter_map(|s| s.mean_ct_baseline)),
        per_step,
    }
}
