//! PageRank on an undirected snapshot via power iteration.

use crate::graph::Snapshot;

/// Hard cap on power-iteration sweeps; convergence is usually far faster.
const MAX_ITERATIONS: usize = 1000;

/// Per-node PageRank scores.
///
/// Treats each undirected edge as a pair of directed links. Mass from
/// dangling (degree-0) nodes is redistributed uniformly, so the scores sum
/// to 1. Iteration stops when the L1 change drops below `tolerance` or
/// after 1000 sweeps. `damping` must lie in (0, 1) — validated by
/// [`FeatureConfig::validate`](crate::features::FeatureConfig::validate)
/// on the public path.
pub fn pagerank(s: &Snapshot, damping: f64, tolerance: f64) -> Vec<f64> {
    let n = s.num_nodes();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(0.0 < damping && damping < 1.0);
    let n_inv = 1.0 / n as f64;
    let mut scores = vec![n_inv; n];
    let mut next = vec![0.0; n];
    for _ in 0..MAX_ITERATIONS {
        let dangling: f64 = (0..n)
            .filter(|&i| s.degree(i) == 0)
            .map(|i| scores[i])
            .sum();
        let base = (1.0 - damping) * n_inv + damping * dangling * n_inv;
        for (i, slot) in next.iter_mut().enumerate() {
            let incoming: f64 = s
                .neighbors(i)
                .iter()
                .map(|&j| scores[j] / s.degree(j) as f64)
                .sum();
            *slot = base + damping * incoming;
        }
        let change: f64 = scores
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .sum();
        std::mem::swap(&mut scores, &mut next);
        if change < tolerance {
            break;
        }
    }
    scores
}
