//! `train`: run dual or baseline training and write the checkpoint, the loss
//! CSV, and the resolved-configuration echo.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use dualkge_core::trainer::{train_baseline, train_dual};
use dualkge_core::{KnowledgeGraph, Vocabulary};

use crate::checkpoint::Checkpoint;
use crate::cli::TrainArgs;
use crate::commands::init_thread_pool;
use crate::config::{resolve_train, Mode, ResolvedRunJson, ResolvedTrain};
use crate::error::{AppError, Result};
use crate::formats::parse_triples;

/// Load the graph(s) a mode needs on one shared vocabulary.
///
/// The positive file is always interned first so that dense indices do not
/// depend on the mode.
fn load_graphs(
    resolved: &ResolvedTrain,
) -> Result<(Arc<Vocabulary>, Option<KnowledgeGraph>, Option<KnowledgeGraph>)> {
    let mut vocab = Vocabulary::new();
    let pos_raw = match &resolved.pos {
        Some(path) => Some(parse_triples(path, &mut vocab)?),
        None => None,
    };
    let neg_raw = match &resolved.neg {
        Some(path) => Some(parse_triples(path, &mut vocab)?),
        None => None,
    };
    let vocab = Arc::new(vocab);
    let build = |raw: Option<Vec<_>>| -> Result<Option<KnowledgeGraph>> {
        raw.map(|triples| KnowledgeGraph::new(vocab.clone(), triples).map_err(AppError::from))
            .transpose()
    };
    let pos = build(pos_raw)?;
    let neg = build(neg_raw)?;
    Ok((vocab, pos, neg))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| AppError::io(path, e))
}

pub struct TrainOutputs {
    pub checkpoint: PathBuf,
    pub loss_csv: PathBuf,
    pub config_json: PathBuf,
}

/// Shared by `train` and the acceptance tooling: returns the artifact paths.
pub fn execute(resolved: &ResolvedTrain, out_dir: &Path) -> Result<TrainOutputs> {
    init_thread_pool(resolved.threads);
    fs::create_dir_all(out_dir).map_err(|e| AppError::io(out_dir, e))?;
    let (vocab, pos, neg) = load_graphs(resolved)?;

    let mut loss_csv = String::new();
    let checkpoint = match resolved.mode {
        Mode::Dual => {
            let pos = pos.expect("dual mode requires --pos");
            let neg = neg.expect("dual mode requires --neg");
            let state = train_dual(&pos, &neg, &resolved.cfg)?;
            loss_csv.push_str("epoch,loss_pos,loss_neg\n");
            for rec in &state.loss_history {
                writeln!(loss_csv, "{},{},{}", rec.epoch, rec.loss_pos, rec.loss_neg)
                    .expect("writing to string cannot fail");
            }
            Checkpoint::for_dual(&vocab, state)
        }
        Mode::BaselinePos | Mode::BaselineNeg => {
            let kg = match resolved.mode {
                Mode::BaselinePos => pos.expect("baseline-pos requires --pos"),
                _ => neg.expect("baseline-neg requires --neg"),
            };
            let state = train_baseline(&kg, &resolved.cfg)?;
            loss_csv.push_str("epoch,loss\n");
            for (i, loss) in state.loss_history.iter().enumerate() {
                writeln!(loss_csv, "{},{}", i + 1, loss).expect("writing to string cannot fail");
            }
            Checkpoint::for_baseline(&vocab, state)
        }
    };

    let outputs = TrainOutputs {
        checkpoint: out_dir.join("checkpoint.json"),
        loss_csv: out_dir.join("loss.csv"),
        config_json: out_dir.join("config.json"),
    };
    checkpoint.save(&outputs.checkpoint)?;
    write_file(&outputs.loss_csv, &loss_csv)?;
    let echo = ResolvedRunJson::new("train", resolved);
    let config_json = serde_json::to_string_pretty(&echo).map_err(|e| AppError::Json {
        context: "serializing resolved config".into(),
        source: e,
    })?;
    write_file(&outputs.config_json, &config_json)?;
    Ok(outputs)
}

pub fn run(args: &TrainArgs) -> Result<()> {
    let resolved = resolve_train(&args.opts, args.mode)?;
    let outputs = execute(&resolved, &args.out_dir)?;
    println!(
        "mode={} kind={} epochs={} -> {}",
        resolved.mode.name(),
        resolved.cfg.kind.name(),
        resolved.cfg.epochs,
        outputs.checkpoint.display()
    );
    Ok(())
}
