//! Neighborhood-overlap similarity scores for a node pair.

use crate::error::{Error, Result};
use crate::graph::Snapshot;

/// Column order used everywhere a similarity block appears in a matrix.
pub const PAIR_SIMILARITY_COLUMNS: [&str; 11] = [
    "cn",
    "jaccard",
    "dice",
    "simpson",
    "cosine",
    "geometric",
    "adamic_adar",
    "resource_alloc",
    "pa_product",
    "pa_sum",
    "total_neighbors",
];

/// The eleven neighborhood-overlap features of one node pair.
///
/// Every ratio is defined as 0 when its denominator is 0, so the struct is
/// always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSimilarity {
    /// |Γ(u) ∩ Γ(v)|
    pub cn: f64,
    /// |∩| / |∪|
    pub jaccard: f64,
    /// 2|∩| / (k_u + k_v)
    pub dice: f64,
    /// |∩| / min(k_u, k_v)
    pub simpson: f64,
    /// |∩| / √(k_u k_v)
    pub cosine: f64,
    /// |∩|² / (k_u k_v)
    pub geometric: f64,
    /// Σ_{z∈∩} 1/ln k_z, skipping common neighbors with k_z = 1
    pub adamic_adar: f64,
    /// Σ_{z∈∩} 1/k_z
    pub resource_alloc: f64,
    /// k_u · k_v
    pub pa_product: f64,
    /// k_u + k_v
    pub pa_sum: f64,
    /// |Γ(u) ∪ Γ(v)|
    pub total_neighbors: f64,
}

impl PairSimilarity {
    /// Values in [`PAIR_SIMILARITY_COLUMNS`] order.
    pub fn to_array(self) -> [f64; 11] {
        [
            self.cn,
            self.jaccard,
            self.dice,
            self.simpson,
            self.cosine,
            self.geometric,
            self.adamic_adar,
            self.resource_alloc,
            self.pa_product,
            self.pa_sum,
            self.total_neighbors,
        ]
    }
}

/// Common neighbors of `u` and `v` (both neighbor lists are sorted).
pub(crate) fn common_neighbors(s: &Snapshot, u: usize, v: usize) -> Vec<usize> {
    let (mut a, mut b) = (s.neighbors(u).iter(), s.neighbors(v).iter());
    let mut shared = Vec::new();
    let (mut x, mut y) = (a.next(), b.next());
    while let (Some(&i), Some(&j)) = (x, y) {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => x = a.next(),
            std::cmp::Ordering::Greater => y = b.next(),
            std::cmp::Ordering::Equal => {
                shared.push(i);
                x = a.next();
                y = b.next();
            }
        }
    }
    shared
}

/// Computes all eleven similarity features for the pair `(u, v)`.
pub fn pair_similarity_features(s: &Snapshot, u: usize, v: usize) -> Result<PairSimilarity> {
    for id in [u, v] {
        if id >= s.num_nodes() {
            return Err(Error::NodeOutOfRange {
                id,
                num_nodes: s.num_nodes(),
            });
        }
    }
    if u == v {
        return Err(Error::InvalidConfig(format!(
            "similarity features need two distinct nodes, got the self-pair ({u},{u})"
        )));
    }
    let ku = s.degree(u) as f64;
    let kv = s.degree(v) as f64;
    let shared = common_neighbors(s, u, v);
    let i = shared.len() as f64;
    let union = ku + kv - i;

    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let mut adamic_adar = 0.0;
    let mut resource_alloc = 0.0;
    for &z in &shared {
        let kz = s.degree(z) as f64;
        if kz > 1.0 {
            adamic_adar += 1.0 / kz.ln();
        }
        resource_alloc += 1.0 / kz;
    }

    Ok(PairSimilarity {
        cn: i,
        jaccard: ratio(i, union),
        dice: ratio(2.0 * i, ku + kv),
        simpson: ratio(i, ku.min(kv)),
        cosine: ratio(i, (ku * kv).sqrt()),
        geometric: ratio(i * i, ku * kv),
        adamic_adar,
        resource_alloc,
        pa_product: ku * kv,
        pa_sum: ku + kv,
        total_neighbors: union,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{TemporalGraph, DAY_MAX};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn g1() -> Snapshot {
        TemporalGraph::build(&[(0, 1, 0), (0, 2, 0), (1, 2, 0), (2, 3, 0), (3, 4, 0)], 5)
            .unwrap()
            .snapshot(DAY_MAX)
    }

    fn assert_close(got: f64, want: f64) {
        assert!(
            (got - want).abs() < 1e-12,
            "expected {want}, got {got}"
        );
    }

    #[test]
    fn g1_pair_0_3() {
        let f = pair_similarity_features(&g1(), 0, 3).unwrap();
        assert_close(f.cn, 1.0);
        assert_close(f.jaccard, 1.0 / 3.0);
        assert_close(f.dice, 0.5);
        assert_close(f.simpson, 0.5);
        assert_close(f.cosine, 0.5);
        assert_close(f.geometric, 0.25);
        assert_close(f.adamic_adar, 1.0 / 3f64.ln());
        assert_close(f.resource_alloc, 1.0 / 3.0);
        assert_close(f.pa_product, 4.0);
        assert_close(f.pa_sum, 4.0);
        assert_close(f.total_neighbors, 3.0);
    }

    #[test]
    fn g1_pair_0_4_has_disjoint_neighborhoods() {
        let f = pair_similarity_features(&g1(), 0, 4).unwrap();
        assert_close(f.cn, 0.0);
        assert_close(f.jaccard, 0.0);
        assert_close(f.dice, 0.0);
        assert_close(f.simpson, 0.0);
        assert_close(f.cosine, 0.0);
        assert_close(f.geometric, 0.0);
        assert_close(f.adamic_adar, 0.0);
        assert_close(f.resource_alloc, 0.0);
        assert_close(f.pa_sum, 3.0);
    }

    #[test]
    fn isolated_pair_is_all_zero() {
        let g = TemporalGraph::build(&[(0, 1, 0)], 4).unwrap();
        let f = pair_similarity_features(&g.snapshot(DAY_MAX), 2, 3).unwrap();
        for value in f.to_array() {
            assert_eq!(value, 0.0);
        }
    }

    #[test]
    fn degree_one_common_neighbor_skipped_by_adamic_adar() {
        // Path 0-2-1 where the shared neighbor 2 has degree 2; contrast with
        // a shared neighbor of degree 1 being impossible (it needs 2 edges),
        // so exercise the guard with a direct lower bound instead: any
        // common neighbor has k_z >= 2, making the skip unreachable from
        // real snapshots. The convention still matters for the formula, so
        // check the degree-2 case numerically.
        let g = TemporalGraph::build(&[(0, 2, 0), (1, 2, 0)], 3).unwrap();
        let f = pair_similarity_features(&g.snapshot(DAY_MAX), 0, 1).unwrap();
        assert_close(f.adamic_adar, 1.0 / 2f64.ln());
        assert_close(f.resource_alloc, 0.5);
    }

    #[test]
    fn self_pair_and_out_of_range_are_errors() {
        let s = g1();
        assert!(pair_similarity_features(&s, 1, 1).is_err());
        assert!(matches!(
            pair_similarity_features(&s, 0, 9),
            Err(crate::Error::NodeOutOfRange { id: 9, .. })
        ));
    }

    /// Brute-force recomputation from scratch sets, for cross-checking.
    fn oracle(s: &Snapshot, u: usize, v: usize) -> [f64; 11] {
        let gu: BTreeSet<usize> = s.neighbors(u).iter().copied().collect();
        let gv: BTreeSet<usize> = s.neighbors(v).iter().copied().collect();
        let inter: Vec<usize> = gu.intersection(&gv).copied().collect();
        let union = gu.union(&gv).count() as f64;
        let (i, ku, kv) = (inter.len() as f64, gu.len() as f64, gv.len() as f64);
        let div = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
        let aa: f64 = inter
            .iter()
            .filter(|&&z| s.degree(z) > 1)
            .map(|&z| 1.0 / (s.degree(z) as f64).ln())
            .sum();
        let ra: f64 = inter.iter().map(|&z| 1.0 / s.degree(z) as f64).sum();
        [
            i,
            div(i, union),
            div(2.0 * i, ku + kv),
            div(i, ku.min(kv)),
            div(i, (ku * kv).sqrt()),
            div(i * i, ku * kv),
            aa,
            ra,
            ku * kv,
            ku + kv,
            union,
        ]
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let n = rng.random_range(5..60);
            let records: Vec<_> = (0..3 * n)
                .map(|_| (rng.random_range(0..n), rng.random_range(0..n), 0i64))
                .collect();
            let s = TemporalGraph::build(&records, n).unwrap().snapshot(0);
            for _ in 0..40 {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u == v {
                    continue;
                }
                let got = pair_similarity_features(&s, u, v).unwrap().to_array();
                let want = oracle(&s, u, v);
                for (g, w) in got.iter().zip(want.iter()) {
                    assert!((g - w).abs() < 1e-12, "mismatch: got {g}, oracle {w}");
                }
            }
        }
    }

    #[test]
    fn ordering_invariants_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 40;
        let records: Vec<_> = (0..120)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n), 0i64))
            .collect();
        let s = TemporalGraph::build(&records, n).unwrap().snapshot(0);
        for u in 0..n {
            for v in (u + 1)..n {
                let f = pair_similarity_features(&s, u, v).unwrap();
                assert!(0.0 <= f.jaccard && f.jaccard <= f.simpson && f.simpson <= 1.0);
                let dice_bound = 2.0 * f.jaccard / (1.0 + f.jaccard);
                assert!(
                    (f.dice - dice_bound).abs() < 1e-12,
                    "dice identity violated: {} vs {}",
                    f.dice,
                    dice_bound
                );
                let min_degree = s.degree(u).min(s.degree(v)) as f64;
                assert!(f.cn <= min_degree);
            }
        }
    }
}
