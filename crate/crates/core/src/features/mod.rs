//! Hand-crafted node and pair features over temporal-graph snapshots.
//!
//! Three feature sets are assembled from the same building blocks:
//!
//! * `baseline15` — degrees, 2-hop neighborhood sizes, and common-neighbor
//!   counts of the pair at three snapshots (15 columns);
//! * `pairsim` — the eleven neighborhood-overlap scores at the newest
//!   snapshot (11 columns);
//! * `extended` — per-node degree/clustering/PageRank/mean-neighbor-degree
//!   series across snapshots with first and second time-differences, plus
//!   the pairsim block (51 columns for three snapshots).
//!
//! Nodes with no edges at the newest snapshot get their `extended` block
//! imputed as the average over recently born nodes (see [`impute_unseen`]).
//! An optional Yeo-Johnson transform Gaussianizes each column; the fitted
//! lambdas travel with the matrix in a [`FeatureRecipe`] so a trained model
//! can reproduce its inputs on new data.

pub mod pagerank;
pub mod similarity;
pub mod transform;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Snapshot, TemporalGraph};

pub use pagerank::pagerank;
pub use similarity::{pair_similarity_features, PairSimilarity, PAIR_SIMILARITY_COLUMNS};
pub use transform::{fit_lambda, pca_fit, pca_transform, yeo_johnson, yeo_johnson_vec, Pca};

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_IMPUTE_WINDOW: i64 = 365;
/// Default look-back offsets from t0, one year apart.
pub const DEFAULT_SNAPSHOT_OFFSETS: [i64; 3] = [0, 365, 730];

/// Which feature matrix to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Baseline15,
    PairSim,
    Extended,
}

impl FeatureSet {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Baseline15 => "baseline15",
            FeatureSet::PairSim => "pairsim",
            FeatureSet::Extended => "extended",
        }
    }

    /// Minimum number of snapshots the set needs (second time-differences
    /// and three yearly blocks both need three).
    pub fn min_snapshots(self) -> usize {
        match self {
            FeatureSet::Baseline15 | FeatureSet::Extended => 3,
            FeatureSet::PairSim => 1,
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline15" => Ok(FeatureSet::Baseline15),
            "pairsim" => Ok(FeatureSet::PairSim),
            "extended" => Ok(FeatureSet::Extended),
            other => Err(Error::InvalidConfig(format!(
                "unknown feature set '{other}' (expected baseline15, pairsim, or extended)"
            ))),
        }
    }
}

/// Everything needed to compute a feature matrix at a fixed anchor day.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Snapshot cutoff days, strictly decreasing; the first entry is t0.
    pub snapshot_days: Vec<i64>,
    pub set: FeatureSet,
    /// PageRank damping factor, in (0, 1).
    pub damping: f64,
    /// PageRank convergence tolerance (L1 change).
    pub tolerance: f64,
    /// Gaussianize each column with a fitted Yeo-Johnson transform.
    pub yeo_johnson: bool,
    /// Look-back window (days) for cold-start imputation donors.
    pub impute_window: i64,
}

impl FeatureConfig {
    /// Config anchored at `t0` with the default yearly offsets and tuning.
    pub fn new(set: FeatureSet, t0: i64) -> Self {
        Self {
            snapshot_days: DEFAULT_SNAPSHOT_OFFSETS.iter().map(|o| t0 - o).collect(),
            set,
            damping: DEFAULT_DAMPING,
            tolerance: DEFAULT_TOLERANCE,
            yeo_johnson: false,
            impute_window: DEFAULT_IMPUTE_WINDOW,
        }
    }

    /// Newest snapshot day (the anchor).
    pub fn t0(&self) -> i64 {
        self.snapshot_days.first().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.snapshot_days.is_empty() {
            return Err(Error::InvalidConfig("snapshot_days must not be empty".into()));
        }
        if self.snapshot_days.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidConfig(format!(
                "snapshot_days must be strictly decreasing from t0, got {:?}",
                self.snapshot_days
            )));
        }
        if self.snapshot_days.len() < self.set.min_snapshots() {
            return Err(Error::InvalidConfig(format!(
                "feature set {} needs at least {} snapshots, got {}",
                self.set,
                self.set.min_snapshots(),
                self.snapshot_days.len()
            )));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "pagerank damping must lie in (0, 1), got {}",
                self.damping
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "pagerank tolerance must be a positive real, got {}",
                self.tolerance
            )));
        }
        if self.impute_window < 1 {
            return Err(Error::InvalidConfig(format!(
                "impute window must be at least 1 day, got {}",
                self.impute_window
            )));
        }
        Ok(())
    }
}

/// Portable description of how a feature matrix was produced, with snapshot
/// days stored as offsets from t0 so the same recipe can be re-anchored at
/// a different prediction date. Travels in feature-CSV headers and model
/// files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecipe {
    pub set: FeatureSet,
    /// `t0 − snapshot_day` for each snapshot; starts with 0.
    pub snapshot_offsets: Vec<i64>,
    pub damping: f64,
    pub tolerance: f64,
    pub yeo_johnson: bool,
    /// Per-column fitted lambdas; present exactly when `yeo_johnson`.
    pub yj_lambdas: Option<Vec<f64>>,
    pub impute_window: i64,
}

impl FeatureRecipe {
    pub fn from_config(cfg: &FeatureConfig, yj_lambdas: Option<Vec<f64>>) -> Self {
        let t0 = cfg.t0();
        Self {
            set: cfg.set,
            snapshot_offsets: cfg.snapshot_days.iter().map(|d| t0 - d).collect(),
            damping: cfg.damping,
            tolerance: cfg.tolerance,
            yeo_johnson: cfg.yeo_johnson,
            yj_lambdas,
            impute_window: cfg.impute_window,
        }
    }

    /// Re-anchors the recipe at a new t0.
    pub fn config_at(&self, t0: i64) -> FeatureConfig {
        FeatureConfig {
            snapshot_days: self.snapshot_offsets.iter().map(|o| t0 - o).collect(),
            set: self.set,
            damping: self.damping,
            tolerance: self.tolerance,
            yeo_johnson: self.yeo_johnson,
            impute_window: self.impute_window,
        }
    }
}

/// Fraction of a node's neighbor pairs that are themselves connected;
/// 0 for nodes with fewer than two neighbors.
pub fn clustering_coefficient(s: &Snapshot, node: usize) -> f64 {
    let nbrs = s.neighbors(node);
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let mut triangles = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if s.contains_edge(a, b) {
                triangles += 1;
            }
        }
    }
    triangles as f64 / (k * (k - 1) / 2) as f64
}

/// Number of distinct nodes within distance 2 of `node` (itself excluded).
pub fn two_hop_size(s: &Snapshot, node: usize) -> usize {
    let mut seen: HashSet<usize> = HashSet::new();
    for &a in s.neighbors(node) {
        seen.insert(a);
        for &b in s.neighbors(a) {
            if b != node {
                seen.insert(b);
            }
        }
    }
    seen.len()
}

/// Average degree over a node's neighbors; 0 for isolated nodes.
pub fn mean_neighbor_degree(s: &Snapshot, node: usize) -> f64 {
    let nbrs = s.neighbors(node);
    if nbrs.is_empty() {
        return 0.0;
    }
    nbrs.iter().map(|&z| s.degree(z) as f64).sum::<f64>() / nbrs.len() as f64
}

/// A snapshot bundled with its PageRank vector, shared by every extractor
/// that works at the same cutoff.
pub(crate) struct SnapshotContext {
    pub(crate) snap: Snapshot,
    pub(crate) pagerank: Vec<f64>,
}

impl SnapshotContext {
    fn new(g: &TemporalGraph, day: i64, damping: f64, tolerance: f64) -> Self {
        let snap = g.snapshot(day);
        let pagerank = pagerank::pagerank(&snap, damping, tolerance);
        Self { snap, pagerank }
    }
}

fn build_contexts(g: &TemporalGraph, cfg: &FeatureConfig) -> Vec<SnapshotContext> {
    cfg.snapshot_days
        .iter()
        .map(|&day| SnapshotContext::new(g, day, cfg.damping, cfg.tolerance))
        .collect()
}

/// The four per-node base features at one snapshot.
fn node_base(ctx: &SnapshotContext, node: usize) -> [f64; 4] {
    [
        ctx.snap.degree(node) as f64,
        clustering_coefficient(&ctx.snap, node),
        ctx.pagerank[node],
        mean_neighbor_degree(&ctx.snap, node),
    ]
}

const NODE_BASE_NAMES: [&str; 4] = ["deg", "clust", "pr", "mnd"];

/// Raw per-node block: base features at every snapshot (newest first),
/// then first differences f0−f1 and second differences f0−2f1+f2 computed
/// from the three newest snapshots.
fn node_block(contexts: &[SnapshotContext], node: usize) -> Vec<f64> {
    let raw: Vec<[f64; 4]> = contexts.iter().map(|c| node_base(c, node)).collect();
    let mut out: Vec<f64> = raw.iter().flatten().copied().collect();
    for f in 0..4 {
        out.push(raw[0][f] - raw[1][f]);
    }
    for f in 0..4 {
        out.push(raw[0][f] - 2.0 * raw[1][f] + raw[2][f]);
    }
    out
}

/// Per-node feature series for the `extended` set: degree, clustering,
/// PageRank, and mean neighbor degree at each configured snapshot, followed
/// by their first and second time-differences (length 4·S + 8).
///
/// Returns raw values — a node born after every snapshot yields zeros;
/// matrix assembly substitutes the [`impute_unseen`] average there.
pub fn node_feature_series(g: &TemporalGraph, node: usize, cfg: &FeatureConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if cfg.snapshot_days.len() < 3 {
        return Err(Error::InvalidConfig(
            "node_feature_series needs at least 3 snapshots for second differences".into(),
        ));
    }
    if node >= g.num_nodes() {
        return Err(Error::NodeOutOfRange {
            id: node,
            num_nodes: g.num_nodes(),
        });
    }
    Ok(node_block(&build_contexts(g, cfg), node))
}

/// Baseline pair features: degrees of both endpoints, 2-hop neighborhood
/// sizes of both endpoints, and the common-neighbor count, each at the
/// snapshots t0, t0−365, and t0−730 (15 values).
pub fn baseline15_features(g: &TemporalGraph, u: usize, v: usize, t0: i64) -> Result<[f64; 15]> {
    let cfg = FeatureConfig::new(FeatureSet::Baseline15, t0);
    for id in [u, v] {
        if id >= g.num_nodes() {
            return Err(Error::NodeOutOfRange {
                id,
                num_nodes: g.num_nodes(),
            });
        }
    }
    if u == v {
        return Err(Error::InvalidConfig(format!(
            "pair features need two distinct nodes, got the self-pair ({u},{u})"
        )));
    }
    let snaps: Vec<Snapshot> = cfg.snapshot_days.iter().map(|&d| g.snapshot(d)).collect();
    Ok(baseline15_from_parts(
        &per_node_baseline(&snaps, u),
        &per_node_baseline(&snaps, v),
        &snaps,
        u,
        v,
    ))
}

/// (degree, 2-hop size) of one node at each of the three snapshots.
fn per_node_baseline(snaps: &[Snapshot], node: usize) -> [(f64, f64); 3] {
    [0, 1, 2].map(|i| {
        (
            snaps[i].degree(node) as f64,
            two_hop_size(&snaps[i], node) as f64,
        )
    })
}

fn baseline15_from_parts(
    nu: &[(f64, f64); 3],
    nv: &[(f64, f64); 3],
    snaps: &[Snapshot],
    u: usize,
    v: usize,
) -> [f64; 15] {
    let mut out = [0.0; 15];
    for s in 0..3 {
        out[2 * s] = nu[s].0;
        out[2 * s + 1] = nv[s].0;
        out[6 + 2 * s] = nu[s].1;
        out[6 + 2 * s + 1] = nv[s].1;
        out[12 + s] = similarity::common_neighbors(&snaps[s], u, v).len() as f64;
    }
    out
}

/// Cold-start substitute: the average extractor output over donor nodes
/// whose first incident edge falls in the window `(t0 − window, t0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Imputation {
    pub values: Vec<f64>,
    pub donor_count: usize,
    /// True when no node was born in the window; `values` is then all
    /// zeros and callers should surface a warning.
    pub used_fallback: bool,
}

/// Averages `extractor` over every node born within `window` days before
/// `t0` (inclusive). `width` sizes the zero fallback when the window is
/// empty.
pub fn impute_unseen<F>(
    g: &TemporalGraph,
    t0: i64,
    window: i64,
    width: usize,
    extractor: F,
) -> Imputation
where
    F: Fn(usize) -> Vec<f64>,
{
    let donors: Vec<usize> = g
        .birth_days()
        .iter()
        .enumerate()
        .filter_map(|(node, &birth)| match birth {
            Some(day) if day > t0 - window && day <= t0 => Some(node),
            _ => None,
        })
        .collect();
    if donors.is_empty() {
        return Imputation {
            values: vec![0.0; width],
            donor_count: 0,
            used_fallback: true,
        };
    }
    let mut values = vec![0.0; width];
    for &donor in &donors {
        let row = extractor(donor);
        debug_assert_eq!(row.len(), width);
        for (acc, x) in values.iter_mut().zip(row) {
            *acc += x;
        }
    }
    for v in &mut values {
        *v /= donors.len() as f64;
    }
    Imputation {
        values,
        donor_count: donors.len(),
        used_fallback: false,
    }
}

/// Ordered column names for a config's feature set.
pub fn feature_columns(cfg: &FeatureConfig) -> Vec<String> {
    match cfg.set {
        FeatureSet::PairSim => PAIR_SIMILARITY_COLUMNS.iter().map(|c| c.to_string()).collect(),
        FeatureSet::Baseline15 => {
            let mut cols = Vec::with_capacity(15);
            for prefix in ["deg", "hop2"] {
                for s in 0..3 {
                    cols.push(format!("{prefix}_u_s{s}"));
                    cols.push(format!("{prefix}_v_s{s}"));
                }
            }
            for s in 0..3 {
                cols.push(format!("cn_s{s}"));
            }
            cols
        }
        FeatureSet::Extended => {
            let snapshots = cfg.snapshot_days.len();
            let mut cols = Vec::new();
            for node in ["u", "v"] {
                for s in 0..snapshots {
                    for base in NODE_BASE_NAMES {
                        cols.push(format!("{base}_{node}_s{s}"));
                    }
                }
                for diff in ["d1", "d2"] {
                    for base in NODE_BASE_NAMES {
                        cols.push(format!("{diff}_{base}_{node}"));
                    }
                }
            }
            cols.extend(PAIR_SIMILARITY_COLUMNS.iter().map(|c| c.to_string()));
            cols
        }
    }
}

/// A pair-feature matrix with its column names and the recipe that
/// produced it. Row order matches the input pair order.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub columns: Vec<String>,
    pub pairs: Vec<(usize, usize)>,
    pub rows: Vec<Vec<f64>>,
    pub recipe: FeatureRecipe,
}

impl FeatureMatrix {
    /// Errors if any cell is NaN or infinite.
    pub fn assert_finite(&self) -> Result<()> {
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::Degenerate(format!(
                        "non-finite feature value {x} at row {r}, column {}",
                        self.columns.get(c).map(String::as_str).unwrap_or("?")
                    )));
                }
            }
        }
        Ok(())
    }

    /// Writes `# linkcast-features v1 <recipe json>`, a `u,v,...` header
    /// row, then one CSV row per pair. Shortest-round-trip float formatting
    /// keeps re-reads bit-exact.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let recipe = serde_json::to_string(&self.recipe)
            .map_err(|e| Error::Schema(format!("feature recipe serialization failed: {e}")))?;
        writeln!(out, "# linkcast-features v1 {recipe}")?;
        writeln!(out, "u,v,{}", self.columns.join(","))?;
        for ((u, v), row) in self.pairs.iter().zip(&self.rows) {
            write!(out, "{u},{v}")?;
            for x in row {
                write!(out, ",{x}")?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
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
            .ok_or_else(|| Error::Schema(format!("{display}: empty feature file")))?;
        let first = first?;
        let recipe_json = first
            .strip_prefix("# linkcast-features v1 ")
            .ok_or_else(|| {
                Error::Schema(format!(
                    "{display}: missing 'linkcast-features v1' recipe header"
                ))
            })?;
        let recipe: FeatureRecipe = serde_json::from_str(recipe_json)
            .map_err(|e| Error::Schema(format!("{display}: bad feature recipe: {e}")))?;

        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Schema(format!("{display}: missing column header")))?;
        let header = header?;
        let mut fields = header.split(',');
        if fields.next() != Some("u") || fields.next() != Some("v") {
            return Err(Error::Schema(format!(
                "{display}: column header must start with 'u,v'"
            )));
        }
        let columns: Vec<String> = fields.map(str::to_string).collect();

        let mut pairs = Vec::new();
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let u: usize = fields
                .next()
                .ok_or_else(|| parse_err(lineno, "missing u".into()))?
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad u: {e}")))?;
            let v: usize = fields
                .next()
                .ok_or_else(|| parse_err(lineno, "missing v".into()))?
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad v: {e}")))?;
            let row: Vec<f64> = fields
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| parse_err(lineno, format!("bad value '{f}': {e}")))
                })
                .collect::<Result<_>>()?;
            if row.len() != columns.len() {
                return Err(parse_err(
                    lineno,
                    format!("expected {} values, got {}", columns.len(), row.len()),
                ));
            }
            pairs.push((u, v));
            rows.push(row);
        }
        Ok(Self {
            columns,
            pairs,
            rows,
            recipe,
        })
    }
}

/// Assembles the configured feature matrix for `pairs`, fitting Yeo-Johnson
/// lambdas on these rows when the config asks for the transform. Pair
/// extraction parallelizes with deterministic row order.
pub fn assemble_features(
    g: &TemporalGraph,
    pairs: &[(usize, usize)],
    cfg: &FeatureConfig,
) -> Result<FeatureMatrix> {
    let (columns, mut rows) = assemble_raw(g, pairs, cfg)?;
    let yj_lambdas = if cfg.yeo_johnson {
        Some(fit_apply_yeo_johnson(&mut rows, columns.len())?)
    } else {
        None
    };
    Ok(FeatureMatrix {
        columns,
        pairs: pairs.to_vec(),
        rows,
        recipe: FeatureRecipe::from_config(cfg, yj_lambdas),
    })
}

/// Re-assembles features under a stored recipe anchored at a new t0,
/// applying the recipe's fitted lambdas instead of refitting — the path a
/// trained model uses at prediction time.
pub fn assemble_with_recipe(
    g: &TemporalGraph,
    pairs: &[(usize, usize)],
    recipe: &FeatureRecipe,
    t0: i64,
) -> Result<FeatureMatrix> {
    let cfg = recipe.config_at(t0);
    let (columns, mut rows) = assemble_raw(g, pairs, &cfg)?;
    if let Some(lambdas) = &recipe.yj_lambdas {
        if lambdas.len() != columns.len() {
            return Err(Error::DimensionMismatch {
                expected: columns.len(),
                got: lambdas.len(),
            });
        }
        apply_yeo_johnson(&mut rows, lambdas);
    } else if recipe.yeo_johnson {
        return Err(Error::Schema(
            "recipe asks for yeo-johnson but carries no fitted lambdas".into(),
        ));
    }
    Ok(FeatureMatrix {
        columns,
        pairs: pairs.to_vec(),
        rows,
        recipe: recipe.clone(),
    })
}

fn assemble_raw(
    g: &TemporalGraph,
    pairs: &[(usize, usize)],
    cfg: &FeatureConfig,
) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    cfg.validate()?;
    for &(u, v) in pairs {
        for id in [u, v] {
            if id >= g.num_nodes() {
                return Err(Error::NodeOutOfRange {
                    id,
                    num_nodes: g.num_nodes(),
                });
            }
        }
        if u == v {
            return Err(Error::InvalidConfig(format!(
                "pair features need two distinct nodes, got the self-pair ({u},{u})"
            )));
        }
    }
    let columns = feature_columns(cfg);
    let contexts = build_contexts(g, cfg);
    let unique: Vec<usize> = pairs
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let rows = match cfg.set {
        FeatureSet::PairSim => {
            let snap = &contexts[0].snap;
            pairs
                .par_iter()
                .map(|&(u, v)| {
                    pair_similarity_features(snap, u, v).map(|f| f.to_array().to_vec())
                })
                .collect::<Result<Vec<_>>>()?
        }
        FeatureSet::Baseline15 => {
            let snaps: Vec<Snapshot> =
                contexts.iter().take(3).map(|c| c.snap.clone()).collect();
            let node_vals: HashMap<usize, [(f64, f64); 3]> = unique
                .par_iter()
                .map(|&n| (n, per_node_baseline(&snaps, n)))
                .collect();
            pairs
                .par_iter()
                .map(|&(u, v)| {
                    baseline15_from_parts(&node_vals[&u], &node_vals[&v], &snaps, u, v).to_vec()
                })
                .collect()
        }
        FeatureSet::Extended => {
            let t0 = cfg.t0();
            let width = 4 * contexts.len() + 8;
            let cold: Vec<usize> = unique
                .iter()
                .copied()
                .filter(|&n| contexts[0].snap.degree(n) == 0)
                .collect();
            let imputed = if cold.is_empty() {
                None
            } else {
                Some(impute_unseen(g, t0, cfg.impute_window, width, |donor| {
                    node_block(&contexts, donor)
                }))
            };
            let node_vals: HashMap<usize, Vec<f64>> = unique
                .par_iter()
                .map(|&n| {
                    let block = if contexts[0].snap.degree(n) == 0 {
                        imputed
                            .as_ref()
                            .expect("imputation computed for cold nodes")
                            .values
                            .clone()
                    } else {
                        node_block(&contexts, n)
                    };
                    (n, block)
                })
                .collect();
            let snap = &contexts[0].snap;
            pairs
                .par_iter()
                .map(|&(u, v)| {
                    let sim = pair_similarity_features(snap, u, v)?;
                    let mut row =
                        Vec::with_capacity(2 * width + PAIR_SIMILARITY_COLUMNS.len());
                    row.extend_from_slice(&node_vals[&u]);
                    row.extend_from_slice(&node_vals[&v]);
                    row.extend_from_slice(&sim.to_array());
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok((columns, rows))
}

/// Fits a lambda per column and transforms in place. An empty matrix keeps
/// identity lambdas so the recipe stays well-formed.
fn fit_apply_yeo_johnson(rows: &mut [Vec<f64>], num_columns: usize) -> Result<Vec<f64>> {
    if rows.is_empty() {
        return Ok(vec![1.0; num_columns]);
    }
    let lambdas: Vec<f64> = (0..num_columns)
        .into_par_iter()
        .map(|c| {
            let column: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            fit_lambda(&column)
        })
        .collect::<Result<_>>()?;
    apply_yeo_johnson(rows, &lambdas);
    Ok(lambdas)
}

fn apply_yeo_johnson(rows: &mut [Vec<f64>], lambdas: &[f64]) {
    rows.par_iter_mut().for_each(|row| {
        for (x, &lambda) in row.iter_mut().zip(lambdas) {
            *x = yeo_johnson(*x, lambda);
        }
    });
}
