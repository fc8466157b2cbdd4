//! Scoring quality (ROC/AUC) and descriptive network statistics.

pub mod analysis;

use crate::error::{Error, Result};
use crate::graph::Snapshot;

pub use analysis::{analysis_report, AnalysisRecord, TopDegree};

/// Minimum tail size accepted by [`fit_power_law`].
pub const MIN_TAIL: usize = 10;

/// ROC curve with its area, positive count, and negative count.
#[derive(Debug, Clone, PartialEq)]
pub struct RocResult {
    /// Probability that a random positive outranks a random negative
    /// (ties count half).
    pub auc: f64,
    /// (false-positive-rate, true-positive-rate) points: (0,0), then one
    /// point per distinct score threshold in descending order, ending (1,1).
    pub curve: Vec<(f64, f64)>,
    pub positives: usize,
    pub negatives: usize,
}

/// Computes the ROC curve and its AUC for `scores` against binary
/// `labels` (nonzero = positive).
///
/// The AUC is the Mann-Whitney rank statistic with midrank tie correction:
/// `(Σ ranks of positives − P(P+1)/2) / (P·N)`, identical to counting wins
/// plus half-ties over all positive×negative pairs. The curve adds one
/// point per distinct threshold, so its trapezoidal area equals the rank
/// statistic.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<RocResult> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    if scores.is_empty() {
        return Err(Error::EmptyInput("auc needs at least one score"));
    }
    if let Some(bad) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFiniteScore(bad));
    }
    let positives = labels.iter().filter(|&&l| l != 0).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }

    // Stable ascending sort; ties form contiguous groups sharing a midrank.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut positive_rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            if labels[idx] != 0 {
                positive_rank_sum += midrank;
            }
        }
        start = end;
    }
    let p = positives as f64;
    let n = negatives as f64;
    let auc = (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);

    // Walk thresholds from the highest score down; each distinct score
    // contributes one curve point after its whole tie group is admitted.
    let mut curve = Vec::with_capacity(order.len() + 1);
    curve.push((0.0, 0.0));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = order.len();
    while i > 0 {
        let threshold = scores[order[i - 1]];
        while i > 0 && scores[order[i - 1]] == threshold {
            if labels[order[i - 1]] != 0 {
                tp += 1;
            } else {
                fp += 1;
            }
            i -= 1;
        }
        curve.push((fp as f64 / n, tp as f64 / p));
    }
    Ok(RocResult {
        auc,
        curve,
        positives,
        negatives,
    })
}

/// Cumulative (node-percentile, edge-endpoint-fraction) points with nodes
/// sorted by increasing degree, starting at (0,0) and ending at
/// (1, 1). Errors when the snapshot has no edges.
pub fn centralization_curve(s: &Snapshot) -> Result<Vec<(f64, f64)>> {
    let mut degrees = s.degrees();
    degrees.sort_unstable();
    let total: usize = degrees.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput(
            "centralization_curve needs at least one edge",
        ));
    }
    let n = degrees.len() as f64;
    let mut points = Vec::with_capacity(degrees.len() + 1);
    points.push((0.0, 0.0));
    let mut cumulative = 0usize;
    for (i, d) in degrees.iter().enumerate() {
        cumulative += d;
        points.push(((i + 1) as f64 / n, cumulative as f64 / total as f64));
    }
    Ok(points)
}

/// A fitted power-law tail exponent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PowerLawFit {
    /// Continuous MLE with the −0.5 discrete correction:
    /// α̂ = 1 + n / Σ ln(k_i / (k_min − 0.5)).
    pub alpha: f64,
    pub k_min: f64,
    /// Number of samples ≥ k_min that entered the fit.
    pub tail_size: usize,
}

/// Fits the tail exponent of a power-law degree distribution over samples
/// ≥ `k_min` (requires `k_min ≥ 1` and at least [`MIN_TAIL`] tail
/// samples). A tail where every sample equals `k_min` has no finite
/// maximum-likelihood exponent and is rejected.
pub fn fit_power_law(samples: &[f64], k_min: f64) -> Result<PowerLawFit> {
    if !(k_min >= 1.0 && k_min.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "fit_power_law needs k_min >= 1, got {k_min}"
        )));
    }
    let mut tail_size = 0usize;
    let mut log_sum = 0.0;
    let mut tail_max = f64::NEG_INFINITY;
    for &k in samples {
        if !k.is_finite() {
            return Err(Error::Degenerate("non-finite degree sample".into()));
        }
        if k >= k_min {
            tail_size += 1;
            log_sum += (k / (k_min - 0.5)).ln();
            tail_max = tail_max.max(k);
        }
    }
    if tail_size < MIN_TAIL {
        return Err(Error::TailTooSmall {
            needed: MIN_TAIL,
            got: tail_size,
        });
    }
    if tail_max <= k_min {
        return Err(Error::Degenerate(
            "every tail sample equals k_min; the exponent estimate diverges".into(),
        ));
    }
    Ok(PowerLawFit {
        alpha: 1.0 + tail_size as f64 / log_sum,
        k_min,
        tail_size,
    })
}
