//! Evolving co-occurrence network and its time-slice views.
//!
//! A [`TemporalGraph`] is an undirected multigraph whose edges carry integer
//! day stamps (days since 1990-01-01; negative for earlier dates). A
//! [`Snapshot`] is the simple graph induced by every temporal edge up to a
//! cutoff day, with per-pair edge multiplicities preserved. Both are
//! immutable after construction and safe to share across threads.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

/// Cutoff sentinel that includes every edge regardless of day.
pub const DAY_MAX: i64 = i64::MAX;

/// One day-stamped undirected edge, stored canonically with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TemporalEdge {
    pub u: usize,
    pub v: usize,
    pub day: i64,
}

/// Day-stamped undirected multigraph over dense integer node ids.
#[derive(Debug, Clone)]
pub struct TemporalGraph {
    num_nodes: usize,
    /// Canonical edges, sorted ascending by day (stable within a day).
    edges: Vec<TemporalEdge>,
    /// Optional id -> concept string metadata; never consulted by algorithms.
    vocab: Option<Vec<String>>,
    self_loops_dropped: usize,
}

impl TemporalGraph {
    /// Builds a graph from raw `(u, v, day)` records.
    ///
    /// Edges are canonicalized to `u < v` and stably sorted by day.
    /// Self-loops are dropped and counted; an out-of-range id is an error
    /// naming the offending record index.
    pub fn build(records: &[(usize, usize, i64)], num_nodes: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(records.len());
        let mut self_loops_dropped = 0;
        for (record, &(u, v, day)) in records.iter().enumerate() {
            for id in [u, v] {
                if id >= num_nodes {
                    return Err(Error::IdOutOfRange {
                        record,
                        id,
                        num_nodes,
                    });
                }
            }
            if u == v {
                self_loops_dropped += 1;
                continue;
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            edges.push(TemporalEdge { u, v, day });
        }
        edges.sort_by_key(|e| e.day);
        Ok(Self {
            num_nodes,
            edges,
            vocab: None,
            self_loops_dropped,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    pub fn vocab(&self) -> Option<&[String]> {
        self.vocab.as_deref()
    }

    /// Attaches an id -> concept string vocabulary. Must cover every node.
    pub fn set_vocab(&mut self, vocab: Vec<String>) -> Result<()> {
        if vocab.len() != self.num_nodes {
            return Err(Error::DimensionMismatch {
                expected: self.num_nodes,
                got: vocab.len(),
            });
        }
        self.vocab = Some(vocab);
        Ok(())
    }

    /// Day of the first edge incident to each node, `None` for isolated nodes.
    pub fn birth_days(&self) -> Vec<Option<i64>> {
        let mut birth = vec![None; self.num_nodes];
        for e in &self.edges {
            for id in [e.u, e.v] {
                if birth[id].is_none() {
                    birth[id] = Some(e.day);
                }
            }
        }
        birth
    }

    /// Freezes the simple-graph state at `cutoff_day` (inclusive).
    ///
    /// The snapshot contains exactly the pairs with at least one temporal
    /// edge at `day <= cutoff_day`; `multiplicity` counts all such edges.
    pub fn snapshot(&self, cutoff_day: i64) -> Snapshot {
        let prefix = self.edges.partition_point(|e| e.day <= cutoff_day);
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); self.num_nodes];
        let mut multiplicity: HashMap<(usize, usize), u32> = HashMap::new();
        for e in &self.edges[..prefix] {
            let count = multiplicity.entry((e.u, e.v)).or_insert(0);
            if *count == 0 {
                adjacency[e.u].push(e.v);
                adjacency[e.v].push(e.u);
            }
            *count += 1;
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Snapshot {
            cutoff_day,
            adjacency,
            multiplicity,
        }
    }
}

/// Immutable simple-graph view of a [`TemporalGraph`] at a cutoff day.
#[derive(Debug, Clone)]
pub struct Snapshot {
    cutoff_day: i64,
    /// Sorted neighbor list per node; symmetric, no self-loops.
    adjacency: Vec<Vec<usize>>,
    /// Canonical pair -> number of temporal edges with day <= cutoff.
    multiplicity: HashMap<(usize, usize), u32>,
}

impl Snapshot {
    pub fn cutoff_day(&self) -> i64 {
        self.cutoff_day
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Number of temporal edges between `u` and `v` at this cutoff.
    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        let key = if u < v { (u, v) } else { (v, u) };
        self.multiplicity.get(&key).copied().unwrap_or(0)
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Number of adjacent pairs (simple edges).
    pub fn num_pairs(&self) -> usize {
        self.multiplicity.len()
    }

    /// Iterates the adjacent canonical pairs in unspecified order.
    pub fn iter_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.multiplicity.keys().copied()
    }

    /// Sizes of connected components with more than one node (descending),
    /// plus the count of isolated nodes.
    pub fn connected_components(&self) -> ComponentSummary {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        let mut sizes = Vec::new();
        let mut isolated = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            if self.adjacency[start].is_empty() {
                seen[start] = true;
                isolated += 1;
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut size = 0;
            while let Some(node) = stack.pop() {
                size += 1;
                for &next in &self.adjacency[node] {
                    if !seen[next] {
                        seen[next] = true;
                        stack.push(next);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        ComponentSummary { sizes, isolated }
    }

    /// Degree -> node count; counts sum to `num_nodes`.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for list in &self.adjacency {
            *hist.entry(list.len()).or_insert(0) += 1;
        }
        hist
    }
}

/// Connected-component sizes (only components with more than one node).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    /// Component sizes in descending order.
    pub sizes: Vec<usize>,
    /// Nodes with no edges at the cutoff.
    pub isolated: usize,
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Canonical 5-node test graph: edges (0,1),(0,2),(1,2),(2,3),(3,4).
    pub(crate) fn g1() -> TemporalGraph {
        TemporalGraph::build(&[(0, 1, 0), (0, 2, 0), (1, 2, 0), (2, 3, 0), (3, 4, 0)], 5)
            .unwrap()
    }

    fn random_records(
        rng: &mut ChaCha8Rng,
        num_nodes: usize,
        num_edges: usize,
    ) -> Vec<(usize, usize, i64)> {
        (0..num_edges)
            .map(|_| {
                (
                    rng.random_range(0..num_nodes),
                    rng.random_range(0..num_nodes),
                    rng.random_range(-100..1000),
                )
            })
            .filter(|(u, v, _)| u != v)
            .collect()
    }

    #[test]
    fn build_canonicalizes_and_sorts() {
        let g = TemporalGraph::build(&[(1, 0, 10), (0, 1, 5)], 2).unwrap();
        assert_eq!(
            g.edges(),
            &[
                TemporalEdge { u: 0, v: 1, day: 5 },
                TemporalEdge { u: 0, v: 1, day: 10 },
            ]
        );
    }

    #[test]
    fn build_drops_self_loops_with_count() {
        let g = TemporalGraph::build(&[(0, 0, 5)], 1).unwrap();
        assert!(g.edges().is_empty());
        assert_eq!(g.self_loops_dropped(), 1);
    }

    #[test]
    fn build_rejects_out_of_range_id() {
        let err = TemporalGraph::build(&[(0, 3, 1)], 2).unwrap_err();
        match err {
            Error::IdOutOfRange {
                record,
                id,
                num_nodes,
            } => {
                assert_eq!((record, id, num_nodes), (0, 3, 2));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn build_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let records = random_records(&mut rng, 30, 200);
        let g = TemporalGraph::build(&records, 30).unwrap();
        let again: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.day)).collect();
        let g2 = TemporalGraph::build(&again, 30).unwrap();
        assert_eq!(g.edges(), g2.edges());
    }

    #[test]
    fn snapshot_counts_multiplicity() {
        let g = TemporalGraph::build(&[(0, 1, 5), (0, 1, 10), (1, 2, 20)], 3).unwrap();
        let s = g.snapshot(10);
        assert_eq!(s.neighbors(0), &[1]);
        assert_eq!(s.neighbors(1), &[0]);
        assert_eq!(s.neighbors(2), &[] as &[usize]);
        assert_eq!(s.multiplicity(0, 1), 2);
        assert_eq!(s.multiplicity(1, 0), 2);
        assert_eq!(s.degrees(), vec![1, 1, 0]);
    }

    #[test]
    fn snapshot_before_all_edges_is_empty() {
        let g = g1();
        let s = g.snapshot(-1_000_000);
        assert_eq!(s.degrees(), vec![0; 5]);
        assert_eq!(s.num_pairs(), 0);
    }

    #[test]
    fn snapshot_at_sentinel_is_whole_graph() {
        let g = TemporalGraph::build(&[(0, 1, 5), (0, 1, 10), (1, 2, 20)], 3).unwrap();
        let s = g.snapshot(DAY_MAX);
        assert_eq!(s.num_pairs(), 2);
        assert_eq!(s.multiplicity(0, 1), 2);
        assert_eq!(s.multiplicity(1, 2), 1);
    }

    #[test]
    fn g1_components() {
        let s = g1().snapshot(DAY_MAX);
        let c = s.connected_components();
        assert_eq!(c.sizes, vec![5]);
        assert_eq!(c.isolated, 0);
    }

    #[test]
    fn empty_snapshot_components() {
        let g = TemporalGraph::build(&[], 3).unwrap();
        let c = g.snapshot(0).connected_components();
        assert!(c.sizes.is_empty());
        assert_eq!(c.isolated, 3);
    }

    #[test]
    fn disjoint_edges_components() {
        let g = TemporalGraph::build(&[(0, 1, 0), (2, 3, 0)], 4).unwrap();
        let c = g.snapshot(0).connected_components();
        assert_eq!(c.sizes, vec![2, 2]);
        assert_eq!(c.isolated, 0);
    }

    #[test]
    fn g1_degree_histogram() {
        let hist = g1().snapshot(DAY_MAX).degree_histogram();
        let expected: BTreeMap<usize, usize> = [(1, 1), (2, 3), (3, 1)].into_iter().collect();
        assert_eq!(hist, expected);
    }

    #[test]
    fn empty_and_star_degree_histograms() {
        let g = TemporalGraph::build(&[], 4).unwrap();
        let hist = g.snapshot(0).degree_histogram();
        assert_eq!(hist, [(0, 4)].into_iter().collect());

        let star = TemporalGraph::build(&[(0, 1, 0), (0, 2, 0), (0, 3, 0)], 4).unwrap();
        let hist = star.snapshot(0).degree_histogram();
        assert_eq!(hist, [(1, 3), (3, 1)].into_iter().collect());
    }

    #[test]
    fn snapshot_monotone_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(2..40);
            let records = random_records(&mut rng, n, 120);
            let g = TemporalGraph::build(&records, n).unwrap();
            let t = rng.random_range(-50..500);
            let t_later = t + rng.random_range(0..500);
            let early = g.snapshot(t);
            let late = g.snapshot(t_later);
            for u in 0..n {
                for &v in early.neighbors(u) {
                    assert!(late.contains_edge(u, v), "adjacency must persist");
                    assert!(
                        early.multiplicity(u, v) <= late.multiplicity(u, v),
                        "multiplicity must be non-decreasing"
                    );
                    assert!(early.contains_edge(v, u), "adjacency must be symmetric");
                }
            }
            let degree_sum: usize = late.degrees().iter().sum();
            assert_eq!(degree_sum, 2 * late.num_pairs());
        }
    }

    #[test]
    fn multiplicity_at_least_one_for_adjacent_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let records = random_records(&mut rng, 20, 80);
        let g = TemporalGraph::build(&records, 20).unwrap();
        let s = g.snapshot(400);
        for u in 0..20 {
            for &v in s.neighbors(u) {
                assert!(s.multiplicity(u, v) >= 1);
                assert_ne!(u, v, "no self-loops in snapshots");
            }
        }
    }
}
