//! A small multilayer perceptron, written out by hand so training is
//! bit-reproducible: ReLU hidden layers, a logistic output unit, binary
//! cross-entropy loss, and exact analytic gradients.
//!
//! Input normalization (per-column z-score fitted on the training matrix)
//! lives inside the model, so a serialized model is self-contained.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureRecipe;

const MODEL_MAGIC: &str = "linkcast-mlp v1";

/// Feed-forward network: sizes `[input, hidden..., 1]`, weights stored flat
/// row-major (`weights[layer][out * fan_in + in]`).
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    norm_mean: Vec<f64>,
    norm_std: Vec<f64>,
    recipe: Option<FeatureRecipe>,
}

/// Gradient of the mean binary cross-entropy, shaped exactly like the
/// model's weights and biases.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Adam,
    Sgd,
}

/// Training hyperparameters. Adam uses β1=0.9, β2=0.999, ε=1e-8 with bias
/// correction; the seed drives both weight init (when the caller uses
/// [`MlpModel::new`]) and the per-epoch shuffle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            epochs: 100,
            batch_size: 32,
            seed: 0,
            optimizer: Optimizer::Adam,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(
                "learning_rate must be positive and finite".into(),
            ));
        }
        if self.batch_size < 1 {
            return Err(Error::InvalidConfig("batch_size must be at least 1".into()));
        }
        if self.epochs < 1 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn validate_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::InvalidConfig(
            "architecture needs at least an input and an output layer".into(),
        ));
    }
    if layer_sizes.iter().any(|&s| s == 0) {
        return Err(Error::InvalidConfig("layer sizes must be positive".into()));
    }
    if *layer_sizes.last().unwrap() != 1 {
        return Err(Error::InvalidConfig(
            "output layer must have exactly 1 unit".into(),
        ));
    }
    Ok(())
}

impl MlpModel {
    /// Fresh model with Glorot-uniform weights (±√(6/(fan_in+fan_out))),
    /// zero biases, and identity normalization.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        validate_sizes(layer_sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..layer_sizes.len() - 1 {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-limit..limit))
                .collect();
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            norm_mean: vec![0.0; layer_sizes[0]],
            norm_std: vec![1.0; layer_sizes[0]],
            recipe: None,
        })
    }

    /// Builds a model from explicit parameters (identity normalization).
    /// Weight slabs are flat row-major `out × in`.
    pub fn with_parameters(
        layer_sizes: &[usize],
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self> {
        validate_sizes(layer_sizes)?;
        let layers = layer_sizes.len() - 1;
        if weights.len() != layers || biases.len() != layers {
            return Err(Error::DimensionMismatch {
                expected: layers,
                got: weights.len().max(biases.len()),
            });
        }
        for l in 0..layers {
            let want_w = layer_sizes[l] * layer_sizes[l + 1];
            if weights[l].len() != want_w {
                return Err(Error::DimensionMismatch {
                    expected: want_w,
                    got: weights[l].len(),
                });
            }
            if biases[l].len() != layer_sizes[l + 1] {
                return Err(Error::DimensionMismatch {
                    expected: layer_sizes[l + 1],
                    got: biases[l].len(),
                });
            }
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            norm_mean: vec![0.0; layer_sizes[0]],
            norm_std: vec![1.0; layer_sizes[0]],
            recipe: None,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn norm_mean(&self) -> &[f64] {
        &self.norm_mean
    }

    pub fn norm_std(&self) -> &[f64] {
        &self.norm_std
    }

    pub fn recipe(&self) -> Option<&FeatureRecipe> {
        self.recipe.as_ref()
    }

    pub fn set_recipe(&mut self, recipe: Option<FeatureRecipe>) {
        self.recipe = recipe;
    }

    /// Fits per-column z-score parameters. Zero-variance columns are passed
    /// through un-normalized (mean 0, std 1).
    pub fn fit_normalization(&mut self, rows: &[Vec<f64>]) -> Result<()> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("normalization sample"));
        }
        self.check_rows(rows)?;
        let d = self.input_dim();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for row in rows {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; d];
        for row in rows {
            for j in 0..d {
                let diff = row[j] - mean[j];
                var[j] += diff * diff;
            }
        }
        for j in 0..d {
            let std = (var[j] / n).sqrt();
            if std > 1e-12 {
                self.norm_mean[j] = mean[j];
                self.norm_std[j] = std;
            } else {
                self.norm_mean[j] = 0.0;
                self.norm_std[j] = 1.0;
            }
        }
        Ok(())
    }

    fn normalize(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.norm_mean)
            .zip(&self.norm_std)
            .map(|((&x, &m), &s)| (x - m) / s)
            .collect()
    }

    fn check_rows(&self, rows: &[Vec<f64>]) -> Result<()> {
        for row in rows {
            if row.len() != self.input_dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.input_dim(),
                    got: row.len(),
                });
            }
        }
        Ok(())
    }

    /// Probability in (0,1) for a single feature row.
    pub fn forward(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: row.len(),
            });
        }
        let mut a = self.normalize(row);
        let layers = self.weights.len();
        for l in 0..layers {
            let fan_in = self.layer_sizes[l];
            let fan_out = self.layer_sizes[l + 1];
            let mut z = self.biases[l].clone();
            for (o, zo) in z.iter_mut().enumerate() {
                let w = &self.weights[l][o * fan_in..(o + 1) * fan_in];
                *zo += w.iter().zip(&a).map(|(&wi, &ai)| wi * ai).sum::<f64>();
            }
            if l + 1 == layers {
                a = z.iter().map(|&v| logistic(v)).collect();
            } else {
                a = z.iter().map(|&v| v.max(0.0)).collect();
            }
            debug_assert_eq!(a.len(), fan_out);
        }
        Ok(a[0])
    }

    /// Forward pass keeping pre-activations and activations for backprop.
    /// Returns (activations per layer incl. normalized input, z per layer).
    fn forward_trace(&self, row: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let layers = self.weights.len();
        let mut activations = Vec::with_capacity(layers + 1);
        let mut zs = Vec::with_capacity(layers);
        activations.push(self.normalize(row));
        for l in 0..layers {
            let fan_in = self.layer_sizes[l];
            let a_prev = activations.last().unwrap();
            let mut z = self.biases[l].clone();
            for (o, zo) in z.iter_mut().enumerate() {
                let w = &self.weights[l][o * fan_in..(o + 1) * fan_in];
                *zo += w.iter().zip(a_prev).map(|(&wi, &ai)| wi * ai).sum::<f64>();
            }
            let a = if l + 1 == layers {
                z.iter().map(|&v| logistic(v)).collect()
            } else {
                z.iter().map(|&v| v.max(0.0)).collect()
            };
            zs.push(z);
            activations.push(a);
        }
        (activations, zs)
    }

    /// Mean binary cross-entropy over a batch (probabilities clamped away
    /// from 0/1 so the loss stays finite).
    pub fn mean_loss(&self, rows: &[Vec<f64>], labels: &[u8]) -> Result<f64> {
        check_batch(rows, labels)?;
        self.check_rows(rows)?;
        let mut total = 0.0;
        for (row, &y) in rows.iter().zip(labels) {
            let p = self.forward(row)?.clamp(1e-12, 1.0 - 1e-12);
            total -= if y == 1 { p.ln() } else { (1.0 - p).ln() };
        }
        Ok(total / rows.len() as f64)
    }

    /// Exact gradients of the mean binary cross-entropy over the batch,
    /// plus the batch loss.
    pub fn gradients(&self, rows: &[Vec<f64>], labels: &[u8]) -> Result<(Gradients, f64)> {
        check_batch(rows, labels)?;
        self.check_rows(rows)?;
        let layers = self.weights.len();
        let mut gw: Vec<Vec<f64>> = self.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut gb: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();
        let mut loss = 0.0;
        for (row, &y) in rows.iter().zip(labels) {
            let (activations, zs) = self.forward_trace(row);
            let p = activations[layers][0];
            let pc = p.clamp(1e-12, 1.0 - 1e-12);
            loss -= if y == 1 { pc.ln() } else { (1.0 - pc).ln() };
            // Logistic + cross-entropy collapse to (p − y) at the output.
            let mut delta = vec![p - f64::from(y)];
            for l in (0..layers).rev() {
                let fan_in = self.layer_sizes[l];
                let a_prev = &activations[l];
                for (o, &d) in delta.iter().enumerate() {
                    gb[l][o] += d;
                    let gwl = &mut gw[l][o * fan_in..(o + 1) * fan_in];
                    for (g, &ai) in gwl.iter_mut().zip(a_prev) {
                        *g += d * ai;
                    }
                }
                if l > 0 {
                    let mut prev = vec![0.0; fan_in];
                    for (o, &d) in delta.iter().enumerate() {
                        let w = &self.weights[l][o * fan_in..(o + 1) * fan_in];
                        for (p, &wi) in prev.iter_mut().zip(w) {
                            *p += d * wi;
                        }
                    }
                    for (p, &z) in prev.iter_mut().zip(&zs[l - 1]) {
                        if z <= 0.0 {
                            *p = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        let n = rows.len() as f64;
        for slab in gw.iter_mut().chain(gb.iter_mut()) {
            for g in slab {
                *g /= n;
            }
        }
        Ok((
            Gradients {
                weights: gw,
                biases: gb,
            },
            loss / n,
        ))
    }

    /// Writes the versioned text format; floats use shortest-round-trip
    /// decimal so load∘save is exact.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{MODEL_MAGIC}")?;
        writeln!(out, "layers {}", join_floats(&to_f64(&self.layer_sizes)))?;
        writeln!(out, "norm_mean {}", join_floats(&self.norm_mean))?;
        writeln!(out, "norm_std {}", join_floats(&self.norm_std))?;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            writeln!(out, "weights {l} {}", join_floats(w))?;
            writeln!(out, "biases {l} {}", join_floats(b))?;
        }
        if let Some(recipe) = &self.recipe {
            writeln!(out, "recipe {}", serde_json::to_string(recipe)?)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
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
            .ok_or_else(|| Error::Schema(format!("{display}: empty model file")))?
            .1?;
        if header.trim() != MODEL_MAGIC {
            return Err(Error::Schema(format!(
                "{display}: expected '{MODEL_MAGIC}' header, got '{}'",
                header.trim()
            )));
        }
        let mut layer_sizes: Option<Vec<usize>> = None;
        let mut norm_mean = None;
        let mut norm_std = None;
        let mut weights: Vec<Vec<f64>> = Vec::new();
        let mut biases: Vec<Vec<f64>> = Vec::new();
        let mut recipe = None;
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let (key, rest) = trimmed.split_once(' ').ok_or_else(|| {
                parse_err(lineno, format!("expected 'key values...', got '{trimmed}'"))
            })?;
            match key {
                "layers" => {
                    let sizes: std::result::Result<Vec<usize>, _> =
                        rest.split_whitespace().map(str::parse).collect();
                    layer_sizes =
                        Some(sizes.map_err(|e| parse_err(lineno, format!("bad layers: {e}")))?);
                }
                "norm_mean" => norm_mean = Some(parse_floats(rest, lineno, &parse_err)?),
                "norm_std" => norm_std = Some(parse_floats(rest, lineno, &parse_err)?),
                "weights" | "biases" => {
                    let (index, values) = rest.split_once(' ').ok_or_else(|| {
                        parse_err(lineno, format!("expected '{key} <layer> values...'"))
                    })?;
                    let index: usize = index
                        .parse()
                        .map_err(|e| parse_err(lineno, format!("bad layer index: {e}")))?;
                    let store = if key == "weights" {
                        &mut weights
                    } else {
                        &mut biases
                    };
                    if index != store.len() {
                        return Err(parse_err(
                            lineno,
                            format!("{key} layer {index} out of order (expected {})", store.len()),
                        ));
                    }
                    store.push(parse_floats(values, lineno, &parse_err)?);
                }
                "recipe" => {
                    recipe = Some(serde_json::from_str(rest).map_err(|e| {
                        parse_err(lineno, format!("bad recipe json: {e}"))
                    })?);
                }
                other => {
                    return Err(parse_err(lineno, format!("unknown field '{other}'")));
                }
            }
        }
        let layer_sizes =
            layer_sizes.ok_or_else(|| Error::Schema(format!("{display}: missing layers line")))?;
        let mut model = Self::with_parameters(&layer_sizes, weights, biases)?;
        let d = model.input_dim();
        let norm_mean =
            norm_mean.ok_or_else(|| Error::Schema(format!("{display}: missing norm_mean")))?;
        let norm_std =
            norm_std.ok_or_else(|| Error::Schema(format!("{display}: missing norm_std")))?;
        if norm_mean.len() != d || norm_std.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: norm_mean.len().min(norm_std.len()),
            });
        }
        model.norm_mean = norm_mean;
        model.norm_std = norm_std;
        model.recipe = recipe;
        Ok(model)
    }
}

fn to_f64(sizes: &[usize]) -> Vec<f64> {
    sizes.iter().map(|&s| s as f64).collect()
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_floats(
    text: &str,
    lineno: usize,
    parse_err: &impl Fn(usize, String) -> Error,
) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|e| parse_err(lineno, format!("bad float '{t}': {e}")))
        })
        .collect()
}

fn check_batch(rows: &[Vec<f64>], labels: &[u8]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("gradient batch"));
    }
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: labels.len(),
        });
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::InvalidConfig("labels must be 0 or 1".into()));
    }
    Ok(())
}

struct AdamState {
    m_w: Vec<Vec<f64>>,
    v_w: Vec<Vec<f64>>,
    m_b: Vec<Vec<f64>>,
    v_b: Vec<Vec<f64>>,
    step: u64,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

fn adam_update(state: &mut AdamState, model: &mut MlpModel, grads: &Gradients, lr: f64) {
    state.step += 1;
    let c1 = 1.0 - ADAM_BETA1.powi(state.step as i32);
    let c2 = 1.0 - ADAM_BETA2.powi(state.step as i32);
    let apply = |params: &mut [f64], grads: &[f64], m: &mut [f64], v: &mut [f64]| {
        for i in 0..params.len() {
            let g = grads[i];
            m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g;
            v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    };
    for l in 0..model.weights.len() {
        apply(
            &mut model.weights[l],
            &grads.weights[l],
            &mut state.m_w[l],
            &mut state.v_w[l],
        );
        apply(
            &mut model.biases[l],
            &grads.biases[l],
            &mut state.m_b[l],
            &mut state.v_b[l],
        );
    }
}

/// Trains in place: fits input normalization on `rows`, then runs seeded
/// minibatch epochs. Returns the per-epoch mean loss. Aborts with a
/// diagnostic if the loss leaves the finite range.
pub fn train(
    model: &mut MlpModel,
    rows: &[Vec<f64>],
    labels: &[u8],
    cfg: &TrainConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_batch(rows, labels)?;
    model.fit_normalization(rows)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = AdamState {
        m_w: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
        v_w: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
        m_b: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        v_b: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        step: 0,
    };
    let mut indices: Vec<usize> = (0..rows.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        use rand::seq::SliceRandom;
        indices.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in indices.chunks(cfg.batch_size) {
            let batch_rows: Vec<Vec<f64>> = chunk.iter().map(|&i| rows[i].clone()).collect();
            let batch_labels: Vec<u8> = chunk.iter().map(|&i| labels[i]).collect();
            let (grads, loss) = model.gradients(&batch_rows, &batch_labels)?;
            epoch_loss += loss * chunk.len() as f64;
            match cfg.optimizer {
                Optimizer::Adam => adam_update(&mut adam, model, &grads, cfg.learning_rate),
                Optimizer::Sgd => {
                    for l in 0..model.weights.len() {
                        for (w, g) in model.weights[l].iter_mut().zip(&grads.weights[l]) {
                            *w -= cfg.learning_rate * g;
                        }
                        for (b, g) in model.biases[l].iter_mut().zip(&grads.biases[l]) {
                            *b -= cfg.learning_rate * g;
                        }
                    }
                }
            }
        }
        epoch_loss /= rows.len() as f64;
        if !epoch_loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        history.push(epoch_loss);
    }
    Ok(history)
}
