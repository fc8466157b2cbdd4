//! Benchmark task construction: candidate pairs at t0, labels at t1.
//!
//! A task asks: of the node pairs that were unconnected at day t0 (and
//! whose endpoints had degree at most c there), which ones are connected by
//! at least w temporal edges at day t1? [`sample_pairs`] draws evaluation
//! instances uniformly; [`balanced_training_set`] builds an equal
//! positive/negative split for training.

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Snapshot, TemporalGraph};

/// Parameters of one prediction task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    /// Training cutoff day: candidates must be unconnected here.
    pub t0_day: i64,
    /// Evaluation day, strictly after `t0_day`; labels read multiplicity here.
    pub t1_day: i64,
    /// Maximum endpoint degree at t0; `None` = unbounded.
    pub degree_cutoff: Option<usize>,
    /// Minimum edge multiplicity at t1 for a positive label (w ≥ 1).
    pub min_multiplicity: u32,
    /// Number of pairs to sample; `None` = every eligible pair.
    pub num_samples: Option<usize>,
    pub seed: u64,
}

impl TaskSpec {
    pub fn validate(&self) -> Result<()> {
        if self.t1_day <= self.t0_day {
            return Err(Error::InvalidConfig(format!(
                "t1_day ({}) must be after t0_day ({})",
                self.t1_day, self.t0_day
            )));
        }
        if self.min_multiplicity < 1 {
            return Err(Error::InvalidConfig(
                "min_multiplicity must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Candidate pairs with their labels, aligned index-by-index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskInstance {
    pub spec: TaskSpec,
    /// Canonical (u < v) pairs, no duplicates.
    pub pairs: Vec<(usize, usize)>,
    /// 1 when the pair reaches the multiplicity threshold at t1.
    pub labels: Vec<u8>,
}

/// Per-node eligibility under the degree cutoff at t0.
fn eligibility(s0: &Snapshot, cutoff: Option<usize>) -> Vec<bool> {
    (0..s0.num_nodes())
        .map(|n| cutoff.is_none_or(|c| s0.degree(n) <= c))
        .collect()
}

/// Number of eligible pairs: unconnected-at-t0 pairs of eligible nodes.
fn count_eligible(s0: &Snapshot, eligible: &[bool]) -> usize {
    let nodes = eligible.iter().filter(|&&e| e).count();
    let adjacent_within = s0
        .iter_pairs()
        .filter(|&(u, v)| eligible[u] && eligible[v])
        .count();
    nodes * (nodes - 1) / 2 - adjacent_within
}

/// Every eligible pair in canonical lexicographic order.
fn enumerate_eligible(s0: &Snapshot, eligible: &[bool]) -> Vec<(usize, usize)> {
    let nodes: Vec<usize> = (0..s0.num_nodes()).filter(|&n| eligible[n]).collect();
    let mut out = Vec::new();
    for (i, &u) in nodes.iter().enumerate() {
        for &v in &nodes[i + 1..] {
            if !s0.contains_edge(u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

/// Draws `count` distinct eligible pairs uniformly at random.
///
/// Sparse requests use rejection sampling over the eligible node set; once
/// the request covers most of the eligible pairs, sampling switches to
/// enumerate-and-shuffle so termination never depends on rejection luck.
/// Both paths are uniform without replacement and deterministic given the
/// RNG state. The optional `extra_reject` predicate lets callers exclude
/// pairs (used for positives when drawing balanced negatives); `available`
/// must already account for the exclusions.
fn draw_pairs(
    s0: &Snapshot,
    eligible: &[bool],
    count: usize,
    available: usize,
    rng: &mut ChaCha8Rng,
    extra_reject: impl Fn(usize, usize) -> bool,
) -> Vec<(usize, usize)> {
    debug_assert!(count <= available);
    if 2 * count >= available {
        let mut all: Vec<(usize, usize)> = enumerate_eligible(s0, eligible)
            .into_iter()
            .filter(|&(u, v)| !extra_reject(u, v))
            .collect();
        let (chosen, _) = all.partial_shuffle(rng, count);
        return chosen.to_vec();
    }
    let nodes: Vec<usize> = (0..s0.num_nodes()).filter(|&n| eligible[n]).collect();
    let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(count * 2);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let i = rng.random_range(0..nodes.len());
        let j = rng.random_range(0..nodes.len());
        if i == j {
            continue;
        }
        let (u, v) = if nodes[i] < nodes[j] {
            (nodes[i], nodes[j])
        } else {
            (nodes[j], nodes[i])
        };
        if s0.contains_edge(u, v) || extra_reject(u, v) || !seen.insert((u, v)) {
            continue;
        }
        out.push((u, v));
    }
    out
}

/// Builds a task instance per `spec`: uniform sampling (or exhaustive
/// enumeration in canonical order for `num_samples = None`) over pairs
/// unconnected at t0 with both endpoint degrees within the cutoff, labeled
/// by multiplicity at t1.
pub fn sample_pairs(g: &TemporalGraph, spec: &TaskSpec) -> Result<TaskInstance> {
    spec.validate()?;
    if g.num_nodes() == 0 {
        return Err(Error::EmptyInput("sample_pairs needs a nonempty graph"));
    }
    let s0 = g.snapshot(spec.t0_day);
    let s1 = g.snapshot(spec.t1_day);
    let eligible = eligibility(&s0, spec.degree_cutoff);
    let pairs = match spec.num_samples {
        None => enumerate_eligible(&s0, &eligible),
        Some(requested) => {
            let available = count_eligible(&s0, &eligible);
            if requested > available {
                return Err(Error::InsufficientPairs {
                    requested,
                    eligible: available,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            draw_pairs(&s0, &eligible, requested, available, &mut rng, |_, _| false)
        }
    };
    let labels = label_multiplicity(&s1, &pairs, spec.min_multiplicity);
    Ok(TaskInstance {
        spec: spec.clone(),
        pairs,
        labels,
    })
}

/// Labels each canonical pair by whether its multiplicity in `s1` reaches
/// `min_multiplicity`; absent pairs have multiplicity 0.
pub fn label_multiplicity(
    s1: &Snapshot,
    pairs: &[(usize, usize)],
    min_multiplicity: u32,
) -> Vec<u8> {
    pairs
        .iter()
        .map(|&(u, v)| u8::from(s1.multiplicity(u, v) >= min_multiplicity))
        .collect()
}

/// Builds a training set with exactly `size/2` positives and `size/2`
/// negatives, shuffled deterministically from `seed`.
///
/// Positives are discovered by scanning the temporal edges in (t0, t1]
/// rather than by sampling: positives are rare, so rejection sampling them
/// directly would be wasteful. The returned spec records `size` and `seed`.
pub fn balanced_training_set(
    g: &TemporalGraph,
    spec: &TaskSpec,
    size: usize,
    seed: u64,
) -> Result<TaskInstance> {
    spec.validate()?;
    if size == 0 || size % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "balanced set size must be a positive even number, got {size}"
        )));
    }
    let half = size / 2;
    let s0 = g.snapshot(spec.t0_day);
    let s1 = g.snapshot(spec.t1_day);
    let eligible = eligibility(&s0, spec.degree_cutoff);

    // Candidate positives: pairs gaining an edge inside the window whose
    // endpoints were eligible and unconnected at t0.
    let mut window_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in g.edges() {
        if e.day > spec.t1_day {
            break; // edges are sorted by day
        }
        if e.day > spec.t0_day && eligible[e.u] && eligible[e.v] && !s0.contains_edge(e.u, e.v) {
            window_pairs.insert((e.u, e.v));
        }
    }
    let mut positives: Vec<(usize, usize)> = window_pairs
        .into_iter()
        .filter(|&(u, v)| s1.multiplicity(u, v) >= spec.min_multiplicity)
        .collect();
    if positives.len() < half {
        return Err(Error::InsufficientPositives {
            requested: half,
            available: positives.len(),
        });
    }

    let available = count_eligible(&s0, &eligible);
    let negative_total = available - positives.len();
    if half > negative_total {
        return Err(Error::InsufficientPairs {
            requested: half,
            eligible: negative_total,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (chosen_pos, _) = positives.partial_shuffle(&mut rng, half);
    let mut labeled: Vec<((usize, usize), u8)> =
        chosen_pos.iter().map(|&p| (p, 1)).collect();
    let negatives = draw_pairs(&s0, &eligible, half, negative_total, &mut rng, |u, v| {
        s1.multiplicity(u, v) >= spec.min_multiplicity
    });
    labeled.extend(negatives.into_iter().map(|p| (p, 0)));
    labeled.shuffle(&mut rng);

    let (pairs, labels) = labeled.into_iter().unzip();
    Ok(TaskInstance {
        spec: TaskSpec {
            num_samples: Some(size),
            seed,
            ..spec.clone()
        },
        pairs,
        labels,
    })
}

/// Writes `# <spec json>` followed by one `u<TAB>v<TAB>label` row per pair.
pub fn write_task_file(task: &TaskInstance, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header = serde_json::to_string(&task.spec)
        .map_err(|e| Error::Schema(format!("task spec serialization failed: {e}")))?;
    writeln!(out, "# {header}")?;
    for (&(u, v), label) in task.pairs.iter().zip(&task.labels) {
        writeln!(out, "{u}\t{v}\t{label}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_task_file(path: &Path) -> Result<TaskInstance> {
    let display = path.display().to_string();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: display.clone(),
        line,
        message,
    };
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Schema(format!("{display}: empty task file")))?;
    let first = first?;
    let spec_json = first.strip_prefix("# ").ok_or_else(|| {
        Error::Schema(format!("{display}: missing '# <spec json>' header line"))
    })?;
    let spec: TaskSpec = serde_json::from_str(spec_json)
        .map_err(|e| Error::Schema(format!("{display}: bad task spec: {e}")))?;

    let mut pairs = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad u: {e}")))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad v: {e}")))?;
        let label: u8 = fields[2]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad label: {e}")))?;
        if label > 1 {
            return Err(parse_err(lineno, format!("label must be 0 or 1, got {label}")));
        }
        pairs.push((u, v));
        labels.push(label);
    }
    Ok(TaskInstance { spec, pairs, labels })
}
