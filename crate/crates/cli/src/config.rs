//! Resolution of training options from flags, an optional key=value config
//! file, and built-in defaults — in that priority order — plus the resolved
//! configuration echo that makes every run reproducible from its artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use dualkge_core::sampling::PoolSize;
use dualkge_core::trainer::{Optimizer, TrainConfig};
use dualkge_core::ModelKind;

use crate::cli::{CommonTrainOpts, KindArg, ModeArg, OptimizerArg};
use crate::error::{AppError, Result};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

const KNOWN_KEYS: &[&str] = &[
    "pos",
    "neg",
    "mode",
    "kind",
    "transe-norm",
    "complex-no-conj",
    "dim",
    "epochs",
    "batches",
    "cl-phase",
    "lr",
    "margin",
    "reg-lambda",
    "optimizer",
    "seed",
    "pool-size",
    "contrastive-every",
    "normalize-entities",
    "threads",
];

/// A parsed `key=value` config file. Lines starting with `#` and blank lines
/// are ignored; keys use the long flag names without the leading dashes.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        let mut values = BTreeMap::new();
        for (i, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(AppError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: format!("expected key=value, found {line:?}"),
                });
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(AppError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: format!("unknown configuration key {key:?}"),
                });
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                AppError::usage(format!("config key {key}: cannot parse value {raw:?}"))
            }),
        }
    }
}

fn parse_pool_size(raw: &str) -> Result<PoolSize> {
    if raw.eq_ignore_ascii_case("all") {
        return Ok(PoolSize::All);
    }
    raw.parse::<usize>()
        .map(PoolSize::Limit)
        .map_err(|_| AppError::usage(format!("pool-size must be \"all\" or a count, got {raw:?}")))
}

fn pool_size_string(pool: PoolSize) -> String {
    match pool {
        PoolSize::All => "all".to_string(),
        PoolSize::Limit(n) => n.to_string(),
    }
}

fn optimizer_name(optimizer: Optimizer) -> &'static str {
    match optimizer {
        Optimizer::Sgd => "sgd",
        Optimizer::Adagrad => "adagrad",
    }
}

fn parse_optimizer(raw: &str) -> Result<Optimizer> {
    match raw.to_ascii_lowercase().as_str() {
        "sgd" => Ok(Optimizer::Sgd),
        "adagrad" => Ok(Optimizer::Adagrad),
        other => Err(AppError::usage(format!("unknown optimizer {other:?}"))),
    }
}

/// Training mode after resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Dual,
    BaselinePos,
    BaselineNeg,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Dual => "dual",
            Mode::BaselinePos => "baseline-pos",
            Mode::BaselineNeg => "baseline-neg",
        }
    }

    fn parse(raw: &str) -> Result<Self> {
        match raw {
            "dual" => Ok(Mode::Dual),
            "baseline-pos" => Ok(Mode::BaselinePos),
            "baseline-neg" => Ok(Mode::BaselineNeg),
            other => Err(AppError::usage(format!("unknown mode {other:?}"))),
        }
    }
}

/// Everything a training run needs, after flag/file/default resolution.
#[derive(Debug, Clone)]
pub struct ResolvedTrain {
    pub mode: Mode,
    pub pos: Option<PathBuf>,
    pub neg: Option<PathBuf>,
    pub cfg: TrainConfig,
    pub threads: usize,
}

fn pick<T>(cli: Option<T>, file: Result<Option<T>>, default: T) -> Result<T> {
    Ok(cli.or(file?).unwrap_or(default))
}

/// Resolve common training options. `mode_flag` comes from `train`; `sweep`
/// passes `None` and is always dual.
pub fn resolve_train(opts: &CommonTrainOpts, mode_flag: Option<ModeArg>) -> Result<ResolvedTrain> {
    let file = match &opts.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };

    let kind_name = match opts.kind {
        Some(KindArg::Transe) => Some("transe".to_string()),
        Some(KindArg::Distmult) => Some("distmult".to_string()),
        Some(KindArg::Complex) => Some("complex".to_string()),
        None => file.get("kind").map(str::to_string),
    };
    let kind_name = kind_name.unwrap_or_else(|| "transe".to_string());
    let transe_norm = pick(opts.transe_norm, file.parsed::<u8>("transe-norm"), 1)?;
    let complex_no_conj =
        opts.complex_no_conj || file.parsed::<bool>("complex-no-conj")?.unwrap_or(false);
    let kind = match kind_name.as_str() {
        "transe" => ModelKind::TransE { norm: transe_norm },
        "distmult" => ModelKind::DistMult,
        "complex" => ModelKind::ComplEx { conjugate: !complex_no_conj },
        other => return Err(AppError::usage(format!("unknown kind {other:?}"))),
    };

    let defaults = TrainConfig::defaults_for(kind);
    let pool_size = match &opts.pool_size {
        Some(raw) => parse_pool_size(raw)?,
        None => match file.get("pool-size") {
            Some(raw) => parse_pool_size(raw)?,
            None => PoolSize::All,
        },
    };
    let optimizer = match opts.optimizer {
        Some(OptimizerArg::Sgd) => Optimizer::Sgd,
        Some(OptimizerArg::Adagrad) => Optimizer::Adagrad,
        None => match file.get("optimizer") {
            Some(raw) => parse_optimizer(raw)?,
            None => defaults.optimizer,
        },
    };

    let cfg = TrainConfig {
        kind,
        dim: pick(opts.dim, file.parsed("dim"), defaults.dim)?,
        epochs: pick(opts.epochs, file.parsed("epochs"), defaults.epochs)?,
        n_batches: pick(opts.batches, file.parsed("batches"), defaults.n_batches)?,
        neg_rate: 1,
        cl_phase: pick(opts.cl_phase, file.parsed("cl-phase"), defaults.cl_phase)?,
        learning_rate: pick(opts.lr, file.parsed("lr"), defaults.learning_rate)?,
        margin: pick(opts.margin, file.parsed("margin"), defaults.margin)?,
        reg_lambda: pick(opts.reg_lambda, file.parsed("reg-lambda"), defaults.reg_lambda)?,
        optimizer,
        seed: pick(opts.seed, file.parsed("seed"), defaults.seed)?,
        pool_size,
        normalize_entities: opts.normalize_entities
            || file.parsed::<bool>("normalize-entities")?.unwrap_or(false),
        contrastive_every: pick(
            opts.contrastive_every,
            file.parsed("contrastive-every"),
            defaults.contrastive_every,
        )?,
    };
    cfg.validate().map_err(|e| AppError::usage(e.to_string()))?;

    let mode = match mode_flag {
        Some(ModeArg::Dual) => Mode::Dual,
        Some(ModeArg::BaselinePos) => Mode::BaselinePos,
        Some(ModeArg::BaselineNeg) => Mode::BaselineNeg,
        None => match file.get("mode") {
            Some(raw) => Mode::parse(raw)?,
            None => Mode::Dual,
        },
    };

    let pos = opts.pos.clone().or_else(|| file.get("pos").map(PathBuf::from));
    let neg = opts.neg.clone().or_else(|| file.get("neg").map(PathBuf::from));
    match mode {
        Mode::Dual => {
            if pos.is_none() || neg.is_none() {
                return Err(AppError::usage("dual mode needs --pos and --neg"));
            }
        }
        Mode::BaselinePos => {
            if pos.is_none() {
                return Err(AppError::usage("baseline-pos mode needs --pos"));
            }
        }
        Mode::BaselineNeg => {
            if neg.is_none() {
                return Err(AppError::usage("baseline-neg mode needs --neg"));
            }
        }
    }

    let threads = resolve_threads(opts.threads, file.parsed("threads")?)?;
    Ok(ResolvedTrain { mode, pos, neg, cfg, threads })
}

/// Thread count: flag, then config file, then `DUALKGE_THREADS`, then
/// available parallelism.
pub fn resolve_threads(flag: Option<usize>, file: Option<usize>) -> Result<usize> {
    let from_env = match std::env::var("DUALKGE_THREADS") {
        Ok(raw) => Some(raw.parse::<usize>().map_err(|_| {
            AppError::usage(format!("DUALKGE_THREADS must be a count, got {raw:?}"))
        })?),
        Err(_) => None,
    };
    let threads = flag
        .or(file)
        .or(from_env)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(AppError::usage("thread count must be at least 1"));
    }
    Ok(threads)
}

/// The resolved-configuration echo written next to every training run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolvedRunJson {
    pub schema_version: u32,
    pub command: String,
    pub mode: String,
    pub pos: Option<String>,
    pub neg: Option<String>,
    pub kind: String,
    pub dim: usize,
    /// Width of one stored entity row after mode adjustments (doubled in
    /// baseline modes, 2x dim for ComplEx).
    pub entity_width: usize,
    pub epochs: usize,
    pub n_batches: usize,
    pub neg_rate: usize,
    pub cl_phase: usize,
    pub learning_rate: f64,
    pub margin: f64,
    pub reg_lambda: f64,
    pub optimizer: String,
    pub seed: u64,
    pub pool_size: String,
    pub contrastive_every: usize,
    pub normalize_entities: bool,
    pub threads: usize,
}

impl ResolvedRunJson {
    pub fn new(command: &str, resolved: &ResolvedTrain) -> Self {
        let cfg = &resolved.cfg;
        let model_dim = match resolved.mode {
            Mode::Dual => cfg.dim,
            _ => 2 * cfg.dim,
        };
        ResolvedRunJson {
            schema_version: CONFIG_SCHEMA_VERSION,
            command: command.to_string(),
            mode: resolved.mode.name().to_string(),
            pos: resolved.pos.as_ref().map(|p| p.display().to_string()),
            neg: resolved.neg.as_ref().map(|p| p.display().to_string()),
            kind: cfg.kind.name().to_string(),
            dim: cfg.dim,
            entity_width: cfg.kind.row_width(model_dim),
            epochs: cfg.epochs,
            n_batches: cfg.n_batches,
            neg_rate: cfg.neg_rate,
            cl_phase: cfg.cl_phase,
            learning_rate: cfg.learning_rate,
            margin: cfg.margin,
            reg_lambda: cfg.reg_lambda,
            optimizer: optimizer_name(cfg.optimizer).to_string(),
            seed: cfg.seed,
            pool_size: pool_size_string(cfg.pool_size),
            contrastive_every: cfg.contrastive_every,
            normalize_entities: cfg.normalize_entities,
            threads: resolved.threads,
        }
    }
}
