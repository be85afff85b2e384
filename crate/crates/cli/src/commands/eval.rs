//! `eval`: run one evaluation task against a checkpoint and emit the JSON
//! report.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use dualkge_core::classify::{evaluate_triple_classification, ClassifyOptions};
use dualkge_core::cluster::clustering_metrics;
use dualkge_core::eval::{evaluate_link_prediction, sem_at_ks, EvalOptions, FilterMode, TieBreak};
use dualkge_core::forest::ForestConfig;
use dualkge_core::{KnowledgeGraph, Vocabulary};

use crate::checkpoint::Checkpoint;
use crate::cli::{EvalArgs, TaskArg};
use crate::commands::init_thread_pool;
use crate::config::resolve_threads;
use crate::error::{AppError, Result};
use crate::formats::{parse_pairs, parse_triples_strict, parse_type_map};
use crate::report::{ClusterReportJson, LpReportJson, SemReportJson, TcReportJson};
use crate::repr::{entity_vector, make_scorer, n_entities};

fn required<'a>(path: &'a Option<PathBuf>, flag: &str, task: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| AppError::usage(format!("task {task} requires {flag}")))
}

fn emit<T: Serialize>(report: &T, out: &Option<PathBuf>) -> Result<()> {
    let json = serde_json::to_string_pretty(report).map_err(|e| AppError::Json {
        context: "serializing report".into(),
        source: e,
    })?;
    match out {
        Some(path) => fs::write(path, json + "\n").map_err(|e| AppError::io(path, e)),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn load_graph_pair(
    args: &EvalArgs,
    vocab: &Arc<Vocabulary>,
    task: &str,
) -> Result<(KnowledgeGraph, KnowledgeGraph)> {
    let train_path = required(&args.train, "--train", task)?;
    let test_path = required(&args.test, "--test", task)?;
    let train = KnowledgeGraph::new(vocab.clone(), parse_triples_strict(train_path, vocab)?)?;
    let test = KnowledgeGraph::new(vocab.clone(), parse_triples_strict(test_path, vocab)?)?;
    Ok((train, test))
}

pub fn run(args: &EvalArgs) -> Result<()> {
    init_thread_pool(resolve_threads(args.threads, None)?);
    let checkpoint = Checkpoint::load(&args.checkpoint)?;
    let vocab = Arc::new(checkpoint.vocabulary()?);

    let ranking_options = EvalOptions {
        filter: if args.filter_train_only { FilterMode::TrainOnly } else { FilterMode::TrainAndTest },
        tie: if args.tie_mean { TieBreak::Mean } else { TieBreak::Optimistic },
    };

    match args.task {
        TaskArg::Lp => {
            let (train, test) = load_graph_pair(args, &vocab, "lp")?;
            let scorer = make_scorer(&checkpoint.state, args.repr)?;
            if scorer.experimental {
                eprintln!(
                    "note: --repr concat ranks by the sum of the positive and negative model \
                     scores; this combination is experimental"
                );
            }
            let metrics =
                evaluate_link_prediction(scorer.as_fn(), &test, &train, &args.ks, ranking_options)?;
            emit(&LpReportJson::new(args.repr.name(), metrics), &args.out)
        }
        TaskArg::Sem => {
            let (train, test) = load_graph_pair(args, &vocab, "sem")?;
            let type_path = required(&args.type_map, "--type-map", "sem")?;
            let types = parse_type_map(type_path, &vocab)?;
            if types.skipped_unknown > 0 {
                eprintln!(
                    "warning: skipped {} type-map lines naming unknown entities",
                    types.skipped_unknown
                );
            }
            let scorer = make_scorer(&checkpoint.state, args.repr)?;
            let options = EvalOptions {
                filter: if args.sem_raw { FilterMode::Raw } else { ranking_options.filter },
                tie: ranking_options.tie,
            };
            let metrics =
                sem_at_ks(scorer.as_fn(), &test, &train, &types.map, &args.ks, options)?;
            if metrics.pool_truncated {
                eprintln!(
                    "warning: some filtered candidate pools were smaller than K; sums are still \
                     divided by K"
                );
            }
            emit(&SemReportJson::new(args.repr.name(), types.skipped_unknown, metrics), &args.out)
        }
        TaskArg::Tc => {
            let pairs_path = required(&args.pairs, "--pairs", "tc")?;
            let pairs = parse_pairs(pairs_path, &vocab)?;
            let forest_cfg = ForestConfig {
                n_trees: args.trees,
                max_depth: args.max_depth,
                min_samples_split: args.min_split,
                features_per_split: args.mtry,
                seed: args.seed,
            };
            let options = ClassifyOptions {
                folds: args.folds,
                seed: args.seed,
                auc_from_labels: args.auc_from_labels,
            };
            let state = &checkpoint.state;
            let repr = args.repr;
            let embed = move |e: usize| {
                entity_vector(state, repr, e).map_err(|err| {
                    dualkge_core::Error::InvalidArgument(err.to_string())
                })
            };
            // surface representation errors (e.g. concat on a baseline) eagerly
            if !pairs.is_empty() {
                entity_vector(state, repr, pairs[0].e1)?;
            }
            let metrics = evaluate_triple_classification(&embed, &pairs, &forest_cfg, &options)?;
            emit(&TcReportJson::new(args.repr.name(), pairs.len(), metrics), &args.out)
        }
        TaskArg::Cluster => {
            let type_path = required(&args.type_map, "--type-map", "cluster")?;
            let types = parse_type_map(type_path, &vocab)?;
            let covered = n_entities(&checkpoint.state);
            let mut rows = Vec::new();
            let mut labels = Vec::new();
            for (entity, type_id) in types.map.typed_entities() {
                if entity < covered {
                    rows.push(entity_vector(&checkpoint.state, args.repr, entity)?);
                    labels.push(type_id);
                }
            }
            let metrics = clustering_metrics(&rows, &labels)?;
            let n_types = {
                let mut distinct: Vec<usize> = labels.clone();
                distinct.sort_unstable();
                distinct.dedup();
                distinct.len()
            };
            if let Some(csv_path) = &args.normalized_csv {
                write_normalized_table(args, metrics, csv_path)?;
            }
            emit(
                &ClusterReportJson::new(
                    args.repr.name(),
                    rows.len(),
                    n_types,
                    types.skipped_unknown,
                    metrics,
                ),
                &args.out,
            )
        }
    }
}

/// Combine this run's clustering metrics with earlier report files and write
/// the min-max-normalized comparison as `label,metric,value` rows.
fn write_normalized_table(
    args: &EvalArgs,
    current: dualkge_core::cluster::ClusteringMetrics,
    csv_path: &Path,
) -> Result<()> {
    use dualkge_core::cluster::{normalize_metric_table, ClusteringMetrics};

    let mut names = vec![args.label.clone()];
    let mut rows = vec![current];
    for spec in &args.compare {
        let Some((name, path)) = spec.split_once('=') else {
            return Err(AppError::usage(format!(
                "--compare expects name=report.json, got {spec:?}"
            )));
        };
        let content =
            fs::read_to_string(path).map_err(|e| AppError::io(PathBuf::from(path), e))?;
        let report: serde_json::Value =
            serde_json::from_str(&content).map_err(|e| AppError::Json {
                context: format!("parsing cluster report {path}"),
                source: e,
            })?;
        let metric = |key: &str| -> Result<f64> {
            report[key].as_f64().ok_or_else(|| {
                AppError::data(format!("{path}: missing numeric field {key:?}"))
            })
        };
        rows.push(ClusteringMetrics {
            calinski_harabasz: metric("calinski_harabasz")?,
            davies_bouldin: metric("davies_bouldin")?,
            silhouette: metric("silhouette")?,
        });
        names.push(name.to_string());
    }

    let normalized = normalize_metric_table(&rows);
    let mut csv = String::from("label,metric,value\n");
    for (name, row) in names.iter().zip(&normalized) {
        use std::fmt::Write as _;
        writeln!(csv, "{name},calinski_harabasz,{}", row.calinski_harabasz).unwrap();
        writeln!(csv, "{name},davies_bouldin_inverted,{}", row.davies_bouldin_inverted).unwrap();
        writeln!(csv, "{name},silhouette,{}", row.silhouette).unwrap();
    }
    fs::write(csv_path, csv).map_err(|e| AppError::io(csv_path, e))
}
