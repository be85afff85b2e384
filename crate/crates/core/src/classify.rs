//! Entity-pair classification: Hadamard features, k-fold cross-validation,
//! and the precision / recall / weighted-F1 / AUC report.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::forest::{forest_predict, forest_train, ForestConfig};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::auc_from_scores;

/// A labeled entity pair; `label` is true for a positive example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairExample {
    pub e1: usize,
    pub e2: usize,
    pub label: bool,
}

/// Elementwise (Hadamard) product of two entity representations.
pub fn pair_features(v1: &[f64], v2: &[f64]) -> Result<Vec<f64>> {
    if v1.len() != v2.len() {
        return Err(Error::arg(format!(
            "representation widths differ ({} vs {})",
            v1.len(),
            v2.len()
        )));
    }
    Ok(v1.iter().zip(v2).map(|(a, b)| a * b).collect())
}

/// Seed-shuffled partition of `0..n` into `k` folds whose sizes differ by at
/// most one. Returns the fold id of each example.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::arg("need at least 2 folds"));
    }
    if n < k {
        return Err(Error::arg(format!("cannot split {n} examples into {k} folds")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut folds = vec![0usize; n];
    for (pos, &example) in order.iter().enumerate() {
        folds[example] = pos % k;
    }
    Ok(folds)
}

/// Precision, recall, support-weighted F1, and AUC of one prediction batch.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldMetrics {
    pub precision: f64,
    pub recall: f64,
    pub weighted_f1: f64,
    pub auc: f64,
}

/// One fold's outcome: metrics, or the error that prevented them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldOutcome {
    pub fold: usize,
    pub metrics: Option<FoldMetrics>,
    pub error: Option<String>,
}

/// Cross-validated classification results.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassificationReport {
    pub folds: Vec<FoldOutcome>,
    /// Per-metric medians over the successful folds.
    pub median: FoldMetrics,
}

fn per_class_prf(truth: &[bool], predicted: &[bool], class: bool) -> (f64, f64, f64, usize) {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut support = 0usize;
    for (&t, &p) in truth.iter().zip(predicted) {
        if t == class {
            support += 1;
            if p == class {
                tp += 1;
            }
        } else if p == class {
            fp += 1;
        }
    }
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if support > 0 { tp as f64 / support as f64 } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (precision, recall, f1, support)
}

/// Per-class precision/recall/F1 averaged with true-class support weights,
/// plus the rank-statistic AUC over `scores`.
pub fn classification_metrics(
    truth: &[bool],
    predicted: &[bool],
    scores: &[f64],
) -> Result<FoldMetrics> {
    if truth.len() != predicted.len() || truth.len() != scores.len() {
        return Err(Error::arg("label and score vectors must be aligned"));
    }
    if truth.is_empty() {
        return Err(Error::arg("metrics need at least one example"));
    }
    if !truth.contains(&true) || !truth.contains(&false) {
        return Err(Error::Metric("true labels contain a single class".into()));
    }
    let n = truth.len() as f64;
    let mut precision = 0.0;
    let mut recall = 0.0;
    let mut weighted_f1 = 0.0;
    for class in [false, true] {
        let (p, r, f1, support) = per_class_prf(truth, predicted, class);
        let weight = support as f64 / n;
        precision += weight * p;
        recall += weight * r;
        weighted_f1 += weight * f1;
    }
    let auc = auc_from_scores(truth, scores)?;
    Ok(FoldMetrics { precision, recall, weighted_f1, auc })
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Options for [`evaluate_triple_classification`].
#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub folds: usize,
    pub seed: u64,
    /// Compute AUC from the hard predicted labels instead of tree-vote
    /// fractions.
    pub auc_from_labels: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { folds: 5, seed: 0, auc_from_labels: false }
    }
}

/// Cross-validated pair classification on Hadamard features.
///
/// `embed` maps an entity index to its representation (e.g. the concatenated
/// dual embedding). Each fold trains a fresh forest on the out-of-fold pairs
/// and predicts the in-fold pairs; a fold whose training portion lacks a
/// class reports an error entry instead of metrics.
pub fn evaluate_triple_classification(
    embed: &dyn Fn(usize) -> Result<Vec<f64>>,
    pairs: &[PairExample],
    forest_cfg: &ForestConfig,
    options: &ClassifyOptions,
) -> Result<ClassificationReport> {
    let labels: Vec<bool> = pairs.iter().map(|p| p.label).collect();
    if !labels.contains(&true) || !labels.contains(&false) {
        return Err(Error::Metric("pair examples contain a single class".into()));
    }
    let features: Vec<Vec<f64>> = pairs
        .iter()
        .map(|p| {
            let v1 = embed(p.e1)?;
            let v2 = embed(p.e2)?;
            pair_features(&v1, &v2)
        })
        .collect::<Result<_>>()?;
    let fold_of = kfold_split(pairs.len(), options.folds, options.seed)?;

    let mut outcomes = Vec::with_capacity(options.folds);
    for fold in 0..options.folds {
        let run = || -> Result<FoldMetrics> {
            let mut train_x = Vec::new();
            let mut train_y = Vec::new();
            let mut test_x = Vec::new();
            let mut test_y = Vec::new();
            for i in 0..pairs.len() {
                if fold_of[i] == fold {
                    test_x.push(features[i].clone());
                    test_y.push(labels[i]);
                } else {
                    train_x.push(features[i].clone());
                    train_y.push(labels[i]);
                }
            }
            let cfg = ForestConfig {
                seed: derive_seed(forest_cfg.seed, &[7, fold as u64]),
                ..forest_cfg.clone()
            };
            let forest = forest_train(&train_x, &train_y, &cfg)?;
            let mut predicted = Vec::with_capacity(test_x.len());
            let mut scores = Vec::with_capacity(test_x.len());
            for x in &test_x {
                let (label, score) = forest_predict(&forest, x)?;
                predicted.push(label);
                scores.push(if options.auc_from_labels {
                    if label {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    score
                });
            }
            classification_metrics(&test_y, &predicted, &scores)
        };
        match run() {
            Ok(metrics) => {
                outcomes.push(FoldOutcome { fold, metrics: Some(metrics), error: None })
            }
            Err(e) => {
                outcomes.push(FoldOutcome { fold, metrics: None, error: Some(e.to_string()) })
            }
        }
    }

    let ok: Vec<&FoldMetrics> = outcomes.iter().filter_map(|o| o.metrics.as_ref()).collect();
    if ok.is_empty() {
        return Err(Error::Metric("every fold failed".into()));
    }
    let median = FoldMetrics {
        precision: median(ok.iter().map(|m| m.precision).collect()),
        recall: median(ok.iter().map(|m| m.recall).collect()),
        weighted_f1: median(ok.iter().map(|m| m.weighted_f1).collect()),
        auc: median(ok.iter().map(|m| m.auc).collect()),
    };
    Ok(ClassificationReport { folds: outcomes, median })
}
