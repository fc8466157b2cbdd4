//! One function per subcommand. Each reads its inputs, runs the library,
//! writes its outputs, and drops a manifest sidecar next to the primary
//! output.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use linkcast::error::Error;
use linkcast::eval::{analysis_report, auc, centralization_curve};
use linkcast::features::{assemble_features, FeatureConfig, FeatureMatrix, FeatureSet};
use linkcast::ingest::{generate_synthetic, read_edge_file, write_edge_file, SyntheticConfig};
use linkcast::models::{
    predict_task, read_scores, train, write_scores, MlpModel, Optimizer, Scorer, TrainConfig,
};
use linkcast::task::{balanced_training_set, read_task_file, sample_pairs, write_task_file, TaskSpec};
use linkcast::Result;

use crate::manifest::{sidecar_path, ManifestBuilder};
use crate::{
    AnalyzeArgs, EvalArgs, FeaturesArgs, GenerateArgs, PredictArgs, TaskArgs, TrainArgs,
};

fn display_opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "none".to_string(),
    }
}

fn parse_i64_list(text: &str, what: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Error::InvalidConfig(format!("bad {what} entry '{}': {e}", t.trim())))
        })
        .collect()
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let mut manifest = ManifestBuilder::new("generate");
    let cfg = SyntheticConfig {
        num_nodes: args.nodes,
        edges_per_new_node: args.m,
        intra_step_edges: args.intra,
        days_per_step: args.days_per_step,
        seed: args.seed,
    };
    let g = generate_synthetic(&cfg)?;
    write_edge_file(&g, &args.out)?;
    manifest
        .seed(args.seed)
        .arg("nodes", args.nodes)
        .arg("m", args.m)
        .arg("intra", args.intra)
        .arg("days-per-step", args.days_per_step)
        .output(&args.out)
        .write(&sidecar_path(&args.out))
}

pub fn cmd_task(args: &TaskArgs) -> Result<()> {
    let mut manifest = ManifestBuilder::new("task");
    let g = read_edge_file(&args.graph)?;
    let spec = TaskSpec {
        t0_day: args.t0,
        t1_day: args.t1,
        degree_cutoff: args.cutoff_c,
        min_multiplicity: args.min_w,
        num_samples: args.samples,
        seed: args.seed,
    };
    let instance = match args.balanced {
        Some(size) => balanced_training_set(&g, &spec, size, args.seed)?,
        None => sample_pairs(&g, &spec)?,
    };
    write_task_file(&instance, &args.out)?;
    manifest
        .seed(args.seed)
        .arg("t0", args.t0)
        .arg("t1", args.t1)
        .arg("cutoff-c", display_opt(&args.cutoff_c))
        .arg("min-w", args.min_w)
        .arg("samples", display_opt(&args.samples))
        .arg("balanced", display_opt(&args.balanced))
        .input(&args.graph)
        .output(&args.out)
        .write(&sidecar_path(&args.out))
}

pub fn cmd_features(args: &FeaturesArgs) -> Result<()> {
    let mut manifest = ManifestBuilder::new("features");
    let g = read_edge_file(&args.graph)?;
    let task = read_task_file(&args.task)?;
    let set = FeatureSet::from_str(&args.set)?;
    let offsets = parse_i64_list(&args.snapshots, "--snapshots")?;
    let cfg = FeatureConfig {
        snapshot_days: offsets.iter().map(|o| task.spec.t0_day - o).collect(),
        set,
        yeo_johnson: args.yeo_johnson,
        impute_window: args.impute_window,
        ..FeatureConfig::new(set, task.spec.t0_day)
    };
    let matrix = assemble_features(&g, &task.pairs, &cfg)?;
    matrix.write_csv(&args.out)?;
    manifest
        .arg("set", set)
        .arg("snapshots", &args.snapshots)
        .arg("yeo-johnson", args.yeo_johnson)
        .arg("impute-window", args.impute_window)
        .input(&args.graph)
        .input(&args.task)
        .output(&args.out)
        .write(&sidecar_path(&args.out))
}

/// Joins feature rows to task labels by (u, v) pair.
fn aligned_labels(matrix: &FeatureMatrix, task: &linkcast::task::TaskInstance) -> Result<Vec<u8>> {
    let lookup: std::collections::HashMap<(usize, usize), u8> = task
        .pairs
        .iter()
        .copied()
        .zip(task.labels.iter().copied())
        .collect();
    matrix
        .pairs
        .iter()
        .map(|p| {
            lookup.get(p).copied().ok_or_else(|| {
                Error::Schema(format!(
                    "feature pair ({}, {}) not present in the task file",
                    p.0, p.1
                ))
            })
        })
        .collect()
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let mut manifest = ManifestBuilder::new("train");
    let matrix = FeatureMatrix::read_csv(&args.features)?;
    let task = read_task_file(&args.labels)?;
    let labels = aligned_labels(&matrix, &task)?;
    let arch: Vec<usize> = args
        .arch
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidConfig(format!("bad --arch entry '{}': {e}", t.trim())))
        })
        .collect::<Result<_>>()?;
    if arch.first() != Some(&matrix.columns.len()) {
        return Err(Error::InvalidConfig(format!(
            "--arch input width {} does not match the {} feature columns",
            arch.first().copied().unwrap_or(0),
            matrix.columns.len()
        )));
    }
    let optimizer = match args.optimizer.as_str() {
        "adam" => Optimizer::Adam,
        "sgd" => Optimizer::Sgd,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown optimizer '{other}' (expected adam or sgd)"
            )))
        }
    };
    let mut model = MlpModel::new(&arch, args.seed)?;
    let cfg = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        batch_size: args.batch,
        seed: args.seed,
        optimizer,
    };
    let history = train(&mut model, &matrix.rows, &labels, &cfg)?;
    model.set_recipe(Some(matrix.recipe.clone()));
    model.save(&args.model_out)?;
    let loss_path = std::path::PathBuf::from(format!("{}.loss.csv", args.model_out.display()));
    let mut out = std::io::BufWriter::new(std::fs::File::create(&loss_path)?);
    writeln!(out, "epoch,loss")?;
    for (epoch, loss) in history.iter().enumerate() {
        writeln!(out, "{epoch},{loss}")?;
    }
    out.flush()?;
    manifest
        .seed(args.seed)
        .arg("arch", &args.arch)
        .arg("lr", args.lr)
        .arg("epochs", args.epochs)
        .arg("batch", args.batch)
        .arg("optimizer", &args.optimizer)
        .input(&args.features)
        .input(&args.labels)
        .output(&args.model_out)
        .output(&loss_path)
        .write(&sidecar_path(&args.model_out))
}

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let mut manifest = ManifestBuilder::new("predict");
    let g = read_edge_file(&args.graph)?;
    let task = read_task_file(&args.task)?;
    let scorer = match args.scorer.as_str() {
        "pa" => Scorer::PaSum,
        "cn" => Scorer::CommonNeighbors,
        "random" => Scorer::Random { seed: args.seed },
        other => match other.strip_prefix("mlp:") {
            Some(path) => {
                let path = Path::new(path);
                manifest.input(path);
                Scorer::Mlp(MlpModel::load(path)?)
            }
            None => {
                return Err(Error::InvalidConfig(format!(
                    "unknown scorer '{other}' (expected pa, cn, random, or mlp:<model>)"
                )))
            }
        },
    };
    let scores = predict_task(&scorer, &g, &task, None)?;
    write_scores(&args.out, &task.pairs, &scores)?;
    manifest
        .seed(args.seed)
        .arg("scorer", &args.scorer)
        .input(&args.graph)
        .input(&args.task)
        .output(&args.out)
        .write(&sidecar_path(&args.out))
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let mut manifest = ManifestBuilder::new("eval");
    let (pairs, scores) = read_scores(&args.scores)?;
    let task = read_task_file(&args.task)?;
    let lookup: std::collections::HashMap<(usize, usize), u8> = task
        .pairs
        .iter()
        .copied()
        .zip(task.labels.iter().copied())
        .collect();
    let labels: Vec<u8> = pairs
        .iter()
        .map(|p| {
            lookup.get(p).copied().ok_or_else(|| {
                Error::Schema(format!(
                    "scored pair ({}, {}) not present in the task file",
                    p.0, p.1
                ))
            })
        })
        .collect::<Result<_>>()?;
    let result = auc(&scores, &labels)?;
    println!("{}", result.auc);
    if let Some(roc_out) = &args.roc_out {
        let mut out = std::io::BufWriter::new(std::fs::File::create(roc_out)?);
        writeln!(out, "fpr,tpr")?;
        for (fpr, tpr) in &result.curve {
            writeln!(out, "{fpr},{tpr}")?;
        }
        out.flush()?;
        manifest
            .arg("auc", result.auc)
            .input(&args.scores)
            .input(&args.task)
            .output(roc_out)
            .write(&sidecar_path(roc_out))?;
    }
    Ok(())
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let mut manifest = ManifestBuilder::new("analyze");
    let g = read_edge_file(&args.graph)?;
    let cutoffs = parse_i64_list(&args.cutoffs, "--cutoffs")?;
    let records = analysis_report(&g, &cutoffs, args.kmin)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let summary = args.out_dir.join("summary.json");
    std::fs::write(&summary, serde_json::to_string_pretty(&records)?)?;
    manifest.output(&summary);
    for record in &records {
        let day = record.cutoff_day;
        let hist_path = args.out_dir.join(format!("degree_histogram_{day}.csv"));
        let mut out = std::io::BufWriter::new(std::fs::File::create(&hist_path)?);
        writeln!(out, "degree,count")?;
        for (degree, count) in &record.degree_histogram {
            writeln!(out, "{degree},{count}")?;
        }
        out.flush()?;
        manifest.output(&hist_path);
        // The centralization curve needs at least one edge; skip the file
        // for cutoffs before the first edge.
        let snapshot = g.snapshot(day);
        if snapshot.num_pairs() > 0 {
            let curve = centralization_curve(&snapshot)?;
            let curve_path = args.out_dir.join(format!("centralization_{day}.csv"));
            let mut out = std::io::BufWriter::new(std::fs::File::create(&curve_path)?);
            writeln!(out, "fraction_nodes,fraction_endpoints")?;
            for (x, y) in &curve {
                writeln!(out, "{x},{y}")?;
            }
            out.flush()?;
            manifest.output(&curve_path);
        }
    }
    manifest
        .arg("cutoffs", &args.cutoffs)
        .arg("kmin", args.kmin)
        .input(&args.graph)
        .write(&args.out_dir.join("manifest.json"))
}
