//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Dual-model knowledge graph embeddings with contrastive negative sampling.
#[derive(Debug, Parser)]
#[command(name = "dualkge", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter positive triples by negative (head, relation) evidence and
    /// split them into train/test sets.
    BuildDataset(BuildDatasetArgs),
    /// Train the dual models, or a single double-width baseline model.
    Train(TrainArgs),
    /// Evaluate a checkpoint: link prediction, Sem@K, triple classification,
    /// or clustering diagnostics.
    Eval(EvalArgs),
    /// Train and evaluate over a grid of contrastive-phase epochs and
    /// embedding dimensions.
    Sweep(SweepArgs),
    /// Export embeddings from a checkpoint as TSV.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Positive and negative models trained in lockstep.
    Dual,
    /// Single model on the positive graph at twice the dimension.
    BaselinePos,
    /// Single model on the negative graph at twice the dimension.
    BaselineNeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Transe,
    Distmult,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Sgd,
    Adagrad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReprArg {
    /// Positive-model embeddings.
    Pos,
    /// Negative-model embeddings.
    Neg,
    /// Concatenated positive and negative embeddings. For link prediction
    /// this scores with both models and sums the scores (experimental).
    Concat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    /// Filtered link-prediction ranking (MRR, Hits@K).
    Lp,
    /// Semantic awareness of top-K predictions (Sem@K).
    Sem,
    /// Entity-pair classification with a random forest.
    Tc,
    /// Clustering separation metrics over typed entities.
    Cluster,
}

/// Training options shared by `train` and `sweep`. Unset values fall back to
/// the `--config` file and then to built-in defaults; flags always win.
#[derive(Debug, Args, Default, Clone)]
pub struct CommonTrainOpts {
    /// Positive-statement triple TSV.
    #[arg(long)]
    pub pos: Option<PathBuf>,
    /// Negative-statement triple TSV.
    #[arg(long)]
    pub neg: Option<PathBuf>,
    /// Scoring model family [default: transe].
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Norm order for TransE, 1 or 2 [default: 1].
    #[arg(long)]
    pub transe_norm: Option<u8>,
    /// Score ComplEx without conjugating the tail embedding.
    #[arg(long)]
    pub complex_no_conj: bool,
    /// Embedding dimension per model [default: 50].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Training epochs [default: 400].
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Mini-batches per epoch [default: 100].
    #[arg(long)]
    pub batches: Option<usize>,
    /// Epoch after which negatives turn contrastive [default: 350].
    #[arg(long)]
    pub cl_phase: Option<usize>,
    /// Learning rate [default: 0.01 for transe, 0.1 otherwise].
    #[arg(long)]
    pub lr: Option<f64>,
    /// Margin of the TransE ranking loss [default: 1].
    #[arg(long)]
    pub margin: Option<f64>,
    /// L2 penalty for DistMult/ComplEx [default: 1e-5].
    #[arg(long)]
    pub reg_lambda: Option<f64>,
    /// Optimizer [default: sgd for transe, adagrad otherwise].
    #[arg(long, value_enum)]
    pub optimizer: Option<OptimizerArg>,
    /// RNG seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Contrastive candidate pool: "all" or a positive count [default: all].
    #[arg(long)]
    pub pool_size: Option<String>,
    /// Regenerate contrastive samples every N contrastive epochs [default: 1].
    #[arg(long)]
    pub contrastive_every: Option<usize>,
    /// Project TransE entity rows onto the unit ball each epoch.
    #[arg(long)]
    pub normalize_entities: bool,
    /// Worker threads [default: DUALKGE_THREADS or available parallelism].
    #[arg(long)]
    pub threads: Option<usize>,
    /// key=value config file supplying defaults for any unset option.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildDatasetArgs {
    /// Positive-statement triple TSV.
    #[arg(long)]
    pub pos: PathBuf,
    /// Negative-statement triple TSV.
    #[arg(long)]
    pub neg: PathBuf,
    /// Output directory (created if absent).
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Fraction of filtered positives moved to the test split, in (0, 1).
    #[arg(long)]
    pub test_fraction: f64,
    /// Shuffle seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub opts: CommonTrainOpts,
    /// Training mode [default: dual].
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Output directory for checkpoint.json, loss.csv, and config.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Checkpoint written by `train`.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Which evaluation to run.
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Test triples TSV (lp, sem).
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Training triples TSV used for filtering and candidates (lp, sem).
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Entity type TSV (sem, cluster).
    #[arg(long)]
    pub type_map: Option<PathBuf>,
    /// Labeled entity-pair TSV (tc).
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Entity representation to evaluate [default: pos].
    #[arg(long, value_enum, default_value = "pos")]
    pub repr: ReprArg,
    /// Comma-separated K values for Hits@K and Sem@K.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 10])]
    pub ks: Vec<usize>,
    /// Use the mean-rank convention for score ties instead of optimistic.
    #[arg(long)]
    pub tie_mean: bool,
    /// Filter only training triples from candidate pools instead of
    /// train plus test.
    #[arg(long)]
    pub filter_train_only: bool,
    /// Compute Sem@K over unfiltered candidate pools.
    #[arg(long)]
    pub sem_raw: bool,
    /// Compute AUC from hard predicted labels instead of vote fractions (tc).
    #[arg(long)]
    pub auc_from_labels: bool,
    /// Random forest size (tc).
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Maximum tree depth (tc); unlimited when omitted.
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Minimum samples to split a node (tc).
    #[arg(long, default_value_t = 2)]
    pub min_split: usize,
    /// Features sampled per split (tc); ceil(sqrt(width)) when omitted.
    #[arg(long)]
    pub mtry: Option<usize>,
    /// Cross-validation folds (tc).
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Seed for fold assignment and forests (tc).
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: DUALKGE_THREADS or available parallelism].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Row label of this run in the normalized comparison table (cluster).
    #[arg(long, default_value = "this-run")]
    pub label: String,
    /// Earlier cluster report to include in the normalized table, as
    /// name=report.json; repeatable (cluster).
    #[arg(long)]
    pub compare: Vec<String>,
    /// Write a min-max-normalized metric table (Davies-Bouldin inverted)
    /// over this run and every --compare row as tidy CSV (cluster).
    #[arg(long)]
    pub normalized_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub opts: CommonTrainOpts,
    /// Test triples TSV evaluated at each grid point.
    #[arg(long)]
    pub test: PathBuf,
    /// Contrastive-phase grid values.
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 150, 200, 250, 300, 350])]
    pub cl_phases: Vec<usize>,
    /// Embedding dimension grid values.
    #[arg(long, value_delimiter = ',', default_values_t = [20usize, 30, 40, 50])]
    pub dims: Vec<usize>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Checkpoint written by `train`.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Output TSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Which embeddings to export. `pos` and `neg` include relations;
    /// `concat` exports entity rows only.
    #[arg(long, value_enum, default_value = "pos")]
    pub which: ReprArg,
}
