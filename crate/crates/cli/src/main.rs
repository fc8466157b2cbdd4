//! `linkcast` — command-line pipeline for temporal-graph link prediction:
//! generate → task → features → train → predict → eval, plus descriptive
//! network analysis. Every command is seeded, deterministic, and drops a
//! manifest recording exactly what it did.

mod commands;
mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  2  usage error (unknown flag or bad invocation)
  3  I/O failure (missing, unreadable, or unwritable file)
  4  parse error or schema mismatch in an input file
  5  invalid configuration value
  6  insufficient data for the request (too few eligible pairs, positives, or tail samples)
  7  numeric failure (non-finite score or diverged training)

Failures print one machine-readable line to stderr: error[<code>] <message>

Any command accepts --config <file> with key=value lines (one per flag,
'#' comments allowed); explicit command-line flags win on conflict.";

#[derive(Parser)]
#[command(
    name = "linkcast",
    version,
    about = "Temporal-graph link prediction benchmark pipeline",
    after_help = EXIT_CODES_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded preferential-attachment temporal graph.
    Generate(GenerateArgs),
    /// Sample a prediction task (candidate pairs + labels) from a graph.
    Task(TaskArgs),
    /// Assemble a feature matrix for a task's candidate pairs.
    Features(FeaturesArgs),
    /// Train an MLP on a feature matrix and labeled task.
    Train(TrainArgs),
    /// Score a task's candidate pairs with a statistical or trained scorer.
    Predict(PredictArgs),
    /// Compute AUC (printed to stdout) and optionally the ROC curve.
    Eval(EvalArgs),
    /// Descriptive network statistics at one or more cutoff days.
    Analyze(AnalyzeArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Generate(a) => &a.common,
            Command::Task(a) => &a.common,
            Command::Features(a) => &a.common,
            Command::Train(a) => &a.common,
            Command::Predict(a) => &a.common,
            Command::Eval(a) => &a.common,
            Command::Analyze(a) => &a.common,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Key=value file mapped onto this command's flags; flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Cap worker threads for feature extraction and scoring
    /// (default: all cores; results are identical for any value).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Total number of nodes.
    #[arg(long)]
    pub nodes: usize,
    /// Edges attached by each arriving node.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Extra degree-proportional edges among existing nodes per step.
    #[arg(long, default_value_t = 0)]
    pub intra: usize,
    /// Days between growth steps (step s lands on day s * this).
    #[arg(long, default_value_t = 1)]
    pub days_per_step: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output edge file.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
pub struct TaskArgs {
    /// Input edge file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Training cutoff day: candidate pairs must be unconnected here.
    #[arg(long)]
    pub t0: i64,
    /// Evaluation day: labels read edge multiplicity here.
    #[arg(long)]
    pub t1: i64,
    /// Maximum endpoint degree at t0 (omit for unbounded; 0 = cold start).
    #[arg(long)]
    pub cutoff_c: Option<usize>,
    /// Minimum multiplicity at t1 for a positive label.
    #[arg(long, default_value_t = 1)]
    pub min_w: u32,
    /// Number of pairs to sample uniformly (omit for every eligible pair).
    #[arg(long, conflicts_with = "balanced")]
    pub samples: Option<usize>,
    /// Build a balanced set of this size (half positives, half negatives).
    #[arg(long)]
    pub balanced: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output task file.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
pub struct FeaturesArgs {
    /// Input edge file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Input task file (supplies the candidate pairs and t0).
    #[arg(long)]
    pub task: PathBuf,
    /// Feature set: baseline15, pairsim, or extended.
    #[arg(long)]
    pub set: String,
    /// Comma-separated day offsets back from t0, newest first.
    #[arg(long, default_value = "0,365,730")]
    pub snapshots: String,
    /// Gaussianize each column with a fitted Yeo-Johnson transform.
    #[arg(long)]
    pub yeo_johnson: bool,
    /// Look-back window (days) for cold-start imputation donors.
    #[arg(long, default_value_t = 365)]
    pub impute_window: i64,
    /// Output feature CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Input feature CSV (from `features`).
    #[arg(long)]
    pub features: PathBuf,
    /// Task file supplying the labels for the feature rows.
    #[arg(long)]
    pub labels: PathBuf,
    /// Comma-separated layer sizes, input first, single output unit last.
    #[arg(long, default_value = "15,100,10,1")]
    pub arch: String,
    /// Learning rate.
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    /// Minibatch size.
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    /// Seed for weight init and epoch shuffling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// adam or sgd.
    #[arg(long, default_value = "adam")]
    pub optimizer: String,
    /// Output model file; the loss history lands beside it as
    /// <model-out>.loss.csv.
    #[arg(long)]
    pub model_out: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
pub struct PredictArgs {
    /// Input edge file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Input task file whose pairs are scored.
    #[arg(long)]
    pub task: PathBuf,
    /// pa, cn, random, or mlp:<model file>.
    #[arg(long)]
    pub scorer: String,
    /// Seed for the random scorer.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output score CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Input score CSV (from `predict`).
    #[arg(long)]
    pub scores: PathBuf,
    /// Task file supplying the labels.
    #[arg(long)]
    pub task: PathBuf,
    /// Optional ROC curve CSV output.
    #[arg(long)]
    pub roc_out: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Input edge file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Comma-separated cutoff days, one report per cutoff.
    #[arg(long)]
    pub cutoffs: String,
    /// Smallest degree included in the power-law tail fit.
    #[arg(long, default_value_t = 5.0)]
    pub kmin: f64,
    /// Output directory for report files.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

fn exit_code(err: &linkcast::Error) -> i32 {
    use linkcast::Error;
    match err {
        Error::Io(_) => 3,
        Error::Parse { .. } | Error::Schema(_) | Error::Json(_) => 4,
        Error::InvalidConfig(_)
        | Error::DimensionMismatch { .. }
        | Error::IdOutOfRange { .. }
        | Error::NodeOutOfRange { .. } => 5,
        Error::InsufficientPairs { .. }
        | Error::InsufficientPositives { .. }
        | Error::TailTooSmall { .. }
        | Error::EmptyInput(_)
        | Error::SingleClass => 6,
        Error::NonFiniteScore(_) | Error::NonFiniteLoss { .. } | Error::Degenerate(_) => 7,
    }
}

fn report(err: &linkcast::Error) -> i32 {
    let code = exit_code(err);
    eprintln!("error[{code}] {err}");
    code
}

/// Expands `--config <file>` into its key=value entries, inserted right
/// after the subcommand token. Keys already present on the command line are
/// skipped, so explicit flags always win. `key=true` becomes a bare flag,
/// `key=false` is dropped.
fn inject_config(argv: Vec<String>) -> linkcast::Result<Vec<String>> {
    let mut config_path = None;
    for (i, arg) in argv.iter().enumerate() {
        if arg == "--config" {
            if let Some(value) = argv.get(i + 1) {
                config_path = Some(PathBuf::from(value));
            }
            break;
        }
        if let Some(value) = arg.strip_prefix("--config=") {
            config_path = Some(PathBuf::from(value));
            break;
        }
    }
    let Some(path) = config_path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)?;
    let mut injected = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(linkcast::Error::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                message: format!("expected key=value, got '{line}'"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let flag = format!("--{key}");
        let prefix = format!("{flag}=");
        if argv.iter().any(|a| a == &flag || a.starts_with(&prefix)) {
            continue;
        }
        match value {
            "true" => injected.push(flag),
            "false" => {}
            _ => {
                injected.push(flag);
                injected.push(value.to_string());
            }
        }
    }
    let mut out = argv;
    let at = 2.min(out.len());
    out.splice(at..at, injected);
    Ok(out)
}

fn run() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match inject_config(argv) {
        Ok(a) => a,
        Err(err) => return report(&err),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.command.common().threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Generate(args) => commands::cmd_generate(args),
        Command::Task(args) => commands::cmd_task(args),
        Command::Features(args) => commands::cmd_features(args),
        Command::Train(args) => commands::cmd_train(args),
        Command::Predict(args) => commands::cmd_predict(args),
        Command::Eval(args) => commands::cmd_eval(args),
        Command::Analyze(args) => commands::cmd_analyze(args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => report(&err),
    }
}

fn main() {
    std::process::exit(run());
}
