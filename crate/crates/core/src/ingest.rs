//! Edge-list file IO and seeded synthetic graph generation.
//!
//! The text format is deliberately plain for diff-ability:
//!
//! ```text
//! num_nodes=<N>
//! u<TAB>v<TAB>day
//! ...
//! ```
//!
//! Blank lines and `#` comments are skipped. The generator grows a
//! preferential-attachment graph, the mechanism behind heavy-tailed degree
//! distributions in co-occurrence networks.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::TemporalGraph;

/// Parameters for [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub num_nodes: usize,
    /// Edges each arriving node attaches with (m ≥ 1).
    pub edges_per_new_node: usize,
    /// Extra degree-proportional edges among existing nodes per step.
    pub intra_step_edges: usize,
    /// Day stamp spacing: step s happens on day s × days_per_step.
    pub days_per_step: i64,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.edges_per_new_node < 1 {
            return Err(Error::InvalidConfig(
                "edges_per_new_node must be at least 1".into(),
            ));
        }
        if self.days_per_step < 1 {
            return Err(Error::InvalidConfig(
                "days_per_step must be a positive integer".into(),
            ));
        }
        if self.num_nodes < self.edges_per_new_node + 1 {
            return Err(Error::InvalidConfig(format!(
                "num_nodes ({}) must be at least m + 1 ({})",
                self.num_nodes,
                self.edges_per_new_node + 1
            )));
        }
        Ok(())
    }
}

/// Reads the `num_nodes=<N>` header plus `u<TAB>v<TAB>day` records.
pub fn read_edge_file(path: &Path) -> Result<TemporalGraph> {
    let display = path.display().to_string();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: display.clone(),
        line,
        message,
    };
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut num_nodes: Option<usize> = None;
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some(n) = num_nodes else {
            let value = trimmed.strip_prefix("num_nodes=").ok_or_else(|| {
                Error::Schema(format!(
                    "{display}: first record must be a 'num_nodes=<N>' header, got '{trimmed}'"
                ))
            })?;
            num_nodes = Some(
                value
                    .parse()
                    .map_err(|e| parse_err(lineno, format!("bad num_nodes value: {e}")))?,
            );
            continue;
        };
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad node id '{}': {e}", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad node id '{}': {e}", fields[1])))?;
        let day: i64 = fields[2]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad day '{}': {e}", fields[2])))?;
        for id in [u, v] {
            if id >= n {
                return Err(parse_err(
                    lineno,
                    format!("node id {id} out of range for num_nodes={n}"),
                ));
            }
        }
        records.push((u, v, day));
    }
    let Some(n) = num_nodes else {
        return Err(Error::Schema(format!(
            "{display}: missing 'num_nodes=<N>' header"
        )));
    };
    TemporalGraph::build(&records, n)
}

/// Writes the exact format [`read_edge_file`] parses, edges in stored
/// (day-sorted) order, so write∘read is the identity on canonical graphs.
pub fn write_edge_file(g: &TemporalGraph, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "num_nodes={}", g.num_nodes())?;
    for e in g.edges() {
        writeln!(out, "{}\t{}\t{}", e.u, e.v, e.day)?;
    }
    out.flush()?;
    Ok(())
}

/// Degree-proportional endpoint pool: holds every edge endpoint, so a
/// uniform draw lands on a node with probability ∝ degree. Drawing with
/// `smoothing` adds one phantom ballot per node, shifting the law to
/// ∝ (degree + 1) and keeping degree-0 nodes reachable.
struct EndpointBag {
    endpoints: Vec<usize>,
}

impl EndpointBag {
    fn new() -> Self {
        Self {
            endpoints: Vec::new(),
        }
    }

    fn record_edge(&mut self, u: usize, v: usize) {
        self.endpoints.push(u);
        self.endpoints.push(v);
    }

    /// Draws from nodes `0..limit` with probability ∝ (degree + 1).
    fn draw_smoothed(&self, rng: &mut ChaCha8Rng, limit: usize) -> usize {
        let r = rng.random_range(0..self.endpoints.len() + limit);
        if r < self.endpoints.len() {
            self.endpoints[r]
        } else {
            r - self.endpoints.len()
        }
    }

    /// Draws from recorded endpoints only (probability ∝ degree).
    fn draw_proportional(&self, rng: &mut ChaCha8Rng) -> usize {
        self.endpoints[rng.random_range(0..self.endpoints.len())]
    }
}

/// Grows a preferential-attachment temporal graph.
///
/// Day 0 holds an (m+1)-clique; step s (day s·days_per_step) adds node
/// m+s with m edges to distinct existing nodes drawn ∝ (degree+1), then
/// `intra_step_edges` extra edges between existing nodes drawn ∝ degree
/// (resampled when already adjacent, bounded retries then skip). Draws
/// within a step see the degrees frozen at the step's start. Deterministic
/// given the seed.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<TemporalGraph> {
    cfg.validate()?;
    let m = cfg.edges_per_new_node;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records: Vec<(usize, usize, i64)> = Vec::new();
    let mut adjacent: HashSet<(usize, usize)> = HashSet::new();
    let mut bag = EndpointBag::new();
    let push_edge = |records: &mut Vec<(usize, usize, i64)>,
                         adjacent: &mut HashSet<(usize, usize)>,
                         u: usize,
                         v: usize,
                         day: i64| {
        let key = if u < v { (u, v) } else { (v, u) };
        adjacent.insert(key);
        records.push((u, v, day));
    };

    for i in 0..=m {
        for j in (i + 1)..=m {
            push_edge(&mut records, &mut adjacent, i, j, 0);
            bag.record_edge(i, j);
        }
    }

    for step in 1..=(cfg.num_nodes - m - 1) {
        let new_node = m + step;
        let day = step as i64 * cfg.days_per_step;
        let step_start = records.len();
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        for _ in 0..m {
            let mut picked = None;
            for _ in 0..64 {
                let candidate = bag.draw_smoothed(&mut rng, new_node);
                if !targets.contains(&candidate) {
                    picked = Some(candidate);
                    break;
                }
            }
            // Dense early steps can exhaust the retry budget; fall back to
            // the smallest node not yet targeted (always exists: the step
            // adds m edges among new_node ≥ m+1 candidates).
            let target = picked.unwrap_or_else(|| {
                (0..new_node)
                    .find(|c| !targets.contains(c))
                    .expect("fewer targets than existing nodes")
            });
            targets.push(target);
        }
        let mut intra: Vec<(usize, usize)> = Vec::with_capacity(cfg.intra_step_edges);
        for _ in 0..cfg.intra_step_edges {
            for _ in 0..32 {
                let u = bag.draw_proportional(&mut rng);
                let v = bag.draw_proportional(&mut rng);
                if u == v {
                    continue;
                }
                let key = if u < v { (u, v) } else { (v, u) };
                if adjacent.contains(&key) || intra.contains(&key) {
                    continue;
                }
                intra.push(key);
                break;
            }
        }
        for &t in &targets {
            push_edge(&mut records, &mut adjacent, new_node, t, day);
        }
        for &(u, v) in &intra {
            push_edge(&mut records, &mut adjacent, u, v, day);
        }
        // The pool catches up only after the step closes, so every draw
        // above saw degrees frozen at the step's start.
        for &(u, v, _) in &records[step_start..] {
            bag.record_edge(u, v);
        }
    }
    TemporalGraph::build(&records, cfg.num_nodes)
}
