//! Link scorers: closed-form statistical baselines, a seeded random
//! control, and the trainable MLP from [`mlp`]. All of them map candidate
//! pairs to real scores where higher means "more likely to link".

pub mod mlp;

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{assemble_with_recipe, similarity, FeatureConfig, FeatureRecipe};
use crate::graph::{Snapshot, TemporalGraph};
use crate::task::TaskInstance;
pub use mlp::{train, MlpModel, Optimizer, TrainConfig};

/// A scoring strategy for candidate pairs.
#[derive(Debug, Clone)]
pub enum Scorer {
    /// Degree sum k_u + k_v at the training cutoff.
    PaSum,
    /// Count of shared neighbors at the training cutoff.
    CommonNeighbors,
    /// Seeded uniform noise — the floor any informative scorer must beat.
    Random { seed: u64 },
    /// Trained network applied to assembled feature rows.
    Mlp(MlpModel),
}

fn check_pairs(s: &Snapshot, pairs: &[(usize, usize)]) -> Result<()> {
    let n = s.num_nodes();
    for &(u, v) in pairs {
        if u >= n || v >= n {
            return Err(Error::NodeOutOfRange {
                id: u.max(v),
                num_nodes: n,
            });
        }
    }
    Ok(())
}

/// Preferential-attachment score: degree(u) + degree(v).
pub fn score_pa_sum(s: &Snapshot, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    check_pairs(s, pairs)?;
    Ok(pairs
        .par_iter()
        .map(|&(u, v)| (s.degree(u) + s.degree(v)) as f64)
        .collect())
}

/// Shared-neighbor count |Γ(u) ∩ Γ(v)|.
pub fn score_common_neighbors(s: &Snapshot, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    check_pairs(s, pairs)?;
    Ok(pairs
        .par_iter()
        .map(|&(u, v)| similarity::common_neighbors(s, u, v).len() as f64)
        .collect())
}

/// Scores every pair of a task, aligned with `task.pairs`.
///
/// Statistical scorers read the t0 snapshot directly. The MLP assembles
/// feature rows using the recipe embedded in the model (so normalization
/// and any fitted transform replay exactly); `fallback_config` is consulted
/// only when the model carries no recipe, and must then describe a
/// transform-free feature set. The random scorer draws one uniform value
/// per pair from its own seeded stream.
pub fn predict_task(
    scorer: &Scorer,
    g: &TemporalGraph,
    task: &TaskInstance,
    fallback_config: Option<&FeatureConfig>,
) -> Result<Vec<f64>> {
    let t0 = task.spec.t0_day;
    let scores = match scorer {
        Scorer::PaSum => score_pa_sum(&g.snapshot(t0), &task.pairs)?,
        Scorer::CommonNeighbors => score_common_neighbors(&g.snapshot(t0), &task.pairs)?,
        Scorer::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            task.pairs.iter().map(|_| rng.random_range(0.0..1.0)).collect()
        }
        Scorer::Mlp(model) => {
            let recipe = match (model.recipe(), fallback_config) {
                (Some(recipe), _) => recipe.clone(),
                (None, Some(cfg)) => {
                    if cfg.yeo_johnson {
                        return Err(Error::Schema(
                            "model carries no fitted transform parameters; \
                             train with the same feature configuration"
                                .into(),
                        ));
                    }
                    FeatureRecipe::from_config(cfg, None)
                }
                (None, None) => {
                    return Err(Error::Schema(
                        "MLP scoring needs a feature recipe (from the model or a config)".into(),
                    ))
                }
            };
            let matrix = assemble_with_recipe(g, &task.pairs, &recipe, t0)?;
            if matrix.columns.len() != model.input_dim() {
                return Err(Error::DimensionMismatch {
                    expected: model.input_dim(),
                    got: matrix.columns.len(),
                });
            }
            matrix
                .rows
                .par_iter()
                .map(|row| model.forward(row))
                .collect::<Result<Vec<f64>>>()?
        }
    };
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFiniteScore(i));
    }
    Ok(scores)
}

/// Writes `u,v,score` rows (header included) with shortest-round-trip
/// float formatting so identical runs produce identical bytes.
pub fn write_scores(path: &Path, pairs: &[(usize, usize)], scores: &[f64]) -> Result<()> {
    if pairs.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: pairs.len(),
            got: scores.len(),
        });
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "u,v,score")?;
    for (&(u, v), s) in pairs.iter().zip(scores) {
        writeln!(out, "{u},{v},{s}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a score CSV written by [`write_scores`].
pub fn read_scores(path: &Path) -> Result<(Vec<(usize, usize)>, Vec<f64>)> {
    let display = path.display().to_string();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: display.clone(),
        line,
        message,
    };
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| Error::Schema(format!("{display}: empty score file")))?
        .1?;
    if header.trim() != "u,v,score" {
        return Err(Error::Schema(format!(
            "{display}: expected 'u,v,score' header, got '{}'",
            header.trim()
        )));
    }
    let mut pairs = Vec::new();
    let mut scores = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 comma-separated fields, got {}", fields.len()),
            ));
        }
        let u = fields[0]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad node id '{}': {e}", fields[0])))?;
        let v = fields[1]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad node id '{}': {e}", fields[1])))?;
        let s = fields[2]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad score '{}': {e}", fields[2])))?;
        pairs.push((u, v));
        scores.push(s);
    }
    Ok((pairs, scores))
}
