//! A small random forest of CART trees for binary labels.
//!
//! Each tree is grown on a bootstrap resample; at every node a random subset
//! of feature indices is considered and the split with the best Gini impurity
//! reduction wins. Leaves keep class counts; the forest predicts by majority
//! vote and exposes the fraction of trees voting for class 1 as a score.

use alloc::vec::Vec;
use alloc::format;

use rand::Rng;

use crate::error::{Error, Result};
use crate::parallel;
use crate::rng::{derive_seed, rng_from_seed, SeededRng};

/// Forest hyperparameters.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Maximum tree depth; `None` grows until purity or `min_samples_split`.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features considered per node; `None` means `ceil(sqrt(n_features))`.
    pub features_per_split: Option<usize>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            features_per_split: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { counts: [usize; 2] },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    /// Class vote of this tree for one sample: true = class 1. Leaf count
    /// ties vote for class 0.
    fn vote(&self, features: &[f64]) -> bool {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => return counts[1] > counts[0],
                Node::Split { feature, threshold, left, right } => {
                    at = if features[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// A trained forest.
#[derive(Debug, Clone)]
pub struct Forest {
    trees: Vec<Tree>,
    n_features: usize,
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

struct TreeBuilder<'a> {
    features: &'a [Vec<f64>],
    labels: &'a [bool],
    mtry: usize,
    max_depth: Option<usize>,
    min_samples_split: usize,
    rng: SeededRng,
    nodes: Vec<Node>,
}

impl TreeBuilder<'_> {
    fn class_counts(&self, samples: &[usize]) -> [usize; 2] {
        let mut counts = [0usize; 2];
        for &i in samples {
            counts[usize::from(self.labels[i])] += 1;
        }
        counts
    }

    /// Uniform draw of `mtry` distinct feature indices, in draw order.
    fn sample_features(&mut self) -> Vec<usize> {
        let n_features = self.features[0].len();
        let mut idx: Vec<usize> = (0..n_features).collect();
        for i in 0..self.mtry.min(n_features) {
            let j = self.rng.gen_range(i..n_features);
            idx.swap(i, j);
        }
        idx.truncate(self.mtry.min(n_features));
        idx
    }

    /// Best (feature, threshold) by Gini reduction over the sampled features,
    /// or `None` when no split improves impurity.
    fn best_split(&mut self, samples: &[usize]) -> Option<(usize, f64)> {
        let parent_counts = self.class_counts(samples);
        let parent_gini = gini(parent_counts);
        let n = samples.len() as f64;
        let mut best: Option<(f64, usize, f64)> = None;
        for feature in self.sample_features() {
            let mut values: Vec<(f64, bool)> =
                samples.iter().map(|&i| (self.features[i][feature], self.labels[i])).collect();
            values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
            let mut left = [0usize; 2];
            let mut right = parent_counts;
            for w in 0..values.len() - 1 {
                let (value, label) = values[w];
                left[usize::from(label)] += 1;
                right[usize::from(label)] -= 1;
                let next_value = values[w + 1].0;
                if next_value == value {
                    continue;
                }
                let nl = (w + 1) as f64;
                let nr = n - nl;
                let weighted = (nl * gini(left) + nr * gini(right)) / n;
                let reduction = parent_gini - weighted;
                if reduction > best.map_or(0.0, |(r, _, _)| r) {
                    best = Some((reduction, feature, 0.5 * (value + next_value)));
                }
            }
        }
        best.map(|(_, feature, threshold)| (feature, threshold))
    }

    fn grow(&mut self, samples: &[usize], depth: usize) -> usize {
        let counts = self.class_counts(samples);
        let is_leaf = counts[0] == 0
            || counts[1] == 0
            || samples.len() < self.min_samples_split
            || self.max_depth.is_some_and(|d| depth >= d);
        if !is_leaf {
            if let Some((feature, threshold)) = self.best_split(samples) {
                let (left_samples, right_samples): (Vec<usize>, Vec<usize>) =
                    samples.iter().partition(|&&i| self.features[i][feature] <= threshold);
                // a valid threshold always separates at least one sample per side
                let at = self.nodes.len();
                self.nodes.push(Node::Leaf { counts }); // placeholder
                let left = self.grow(&left_samples, depth + 1);
                let right = self.grow(&right_samples, depth + 1);
                self.nodes[at] = Node::Split { feature, threshold, left, right };
                return at;
            }
        }
        self.nodes.push(Node::Leaf { counts });
        self.nodes.len() - 1
    }
}

/// Train a forest on a feature matrix and aligned binary labels.
pub fn forest_train(features: &[Vec<f64>], labels: &[bool], cfg: &ForestConfig) -> Result<Forest> {
    if features.len() != labels.len() {
        return Err(Error::arg(format!(
            "feature and label counts differ ({} vs {})",
            features.len(),
            labels.len()
        )));
    }
    if features.len() < 2 {
        return Err(Error::arg("need at least 2 training examples"));
    }
    let n_features = features[0].len();
    if n_features == 0 {
        return Err(Error::arg("feature vectors must be non-empty"));
    }
    if features.iter().any(|f| f.len() != n_features) {
        return Err(Error::arg("feature vectors must all have the same width"));
    }
    if cfg.n_trees == 0 {
        return Err(Error::arg("n_trees must be at least 1"));
    }
    if !labels.contains(&true) || !labels.contains(&false) {
        return Err(Error::Metric("training labels contain a single class".into()));
    }
    let mtry = cfg
        .features_per_split
        .unwrap_or_else(|| {
            // ceil(sqrt(n_features))
            let mut m = 1;
            while m * m < n_features {
                m += 1;
            }
            m
        })
        .clamp(1, n_features);

    let n = features.len();
    let trees = parallel::map_range(cfg.n_trees, |t| {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, &[11, t as u64]));
        let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mut builder = TreeBuilder {
            features,
            labels,
            mtry,
            max_depth: cfg.max_depth,
            min_samples_split: cfg.min_samples_split,
            rng,
            nodes: Vec::new(),
        };
        builder.grow(&bootstrap, 0);
        Tree { nodes: builder.nodes }
    });

    Ok(Forest { trees, n_features })
}

/// Majority-vote prediction plus the fraction of trees voting for class 1.
///
/// An exact 50/50 vote predicts class 0.
pub fn forest_predict(forest: &Forest, features: &[f64]) -> Result<(bool, f64)> {
    if features.len() != forest.n_features {
        return Err(Error::arg(format!(
            "feature width {} does not match training width {}",
            features.len(),
            forest.n_features
        )));
    }
    let votes_for_one = forest.trees.iter().filter(|t| t.vote(features)).count();
    let score = votes_for_one as f64 / forest.trees.len() as f64;
    Ok((score > 0.5, score))
}

impl Forest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Structural fingerprint for determinism checks: per tree, the sequence
    /// of (feature, threshold) splits in node order.
    pub fn split_signature(&self) -> Vec<Vec<(usize, f64)>> {
        self.trees
            .iter()
            .map(|tree| {
                tree.nodes
                    .iter()
                    .filter_map(|n| match n {
                        Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
                        Node::Leaf { .. } => None,
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One feature separates the classes perfectly, the other is noise.
    fn separable_data(n: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut rng = rng_from_seed(99);
        let mut features = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let label = i % 2 == 0;
            let x = if label { 1.0 + rng.gen::<f64>() } else { -1.0 - rng.gen::<f64>() };
            features.push(vec![x, rng.gen::<f64>()]);
            labels.push(label);
        }
        (features, labels)
    }

    #[test]
    fn separable_data_reaches_perfect_training_accuracy() {
        let (features, labels) = separable_data(60);
        let cfg = ForestConfig { n_trees: 15, seed: 5, ..Default::default() };
        let forest = forest_train(&features, &labels, &cfg).unwrap();
        for (f, &l) in features.iter().zip(&labels) {
            let (pred, score) = forest_predict(&forest, f).unwrap();
            assert_eq!(pred, l);
            if l {
                assert!(score > 0.5);
            } else {
                assert!(score <= 0.5);
            }
        }
        // every tree's root splits on the separating feature 0
        for splits in forest.split_signature() {
            assert_eq!(splits[0].0, 0);
        }
    }

    #[test]
    fn depth_zero_gives_majority_stump() {
        let features = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        let labels = vec![true, true, true, false, false];
        let cfg = ForestConfig {
            n_trees: 1,
            max_depth: Some(0),
            seed: 1,
            ..Default::default()
        };
        let forest = forest_train(&features, &labels, &cfg).unwrap();
        assert!(forest.split_signature()[0].is_empty());
        // bootstrap majority decides every prediction identically
        let (p0, s0) = forest_predict(&forest, &[0.0]).unwrap();
        let (p4, s4) = forest_predict(&forest, &[4.0]).unwrap();
        assert_eq!(p0, p4);
        assert_eq!(s0, s4);
    }

    #[test]
    fn same_seed_same_forest() {
        let (features, labels) = separable_data(40);
        let cfg = ForestConfig { n_trees: 8, seed: 123, ..Default::default() };
        let a = forest_train(&features, &labels, &cfg).unwrap();
        let b = forest_train(&features, &labels, &cfg).unwrap();
        assert_eq!(a.split_signature(), b.split_signature());
        for f in &features {
            assert_eq!(forest_predict(&a, f).unwrap(), forest_predict(&b, f).unwrap());
        }
    }

    #[test]
    fn single_class_input_is_rejected() {
        let features = vec![vec![0.0], vec![1.0]];
        let labels = vec![true, true];
        assert!(matches!(
            forest_train(&features, &labels, &ForestConfig::default()),
            Err(Error::Metric(_))
        ));
    }

    #[test]
    fn prediction_rejects_width_mismatch() {
        let (features, labels) = separable_data(20);
        let forest = forest_train(
            &features,
            &labels,
            &ForestConfig { n_trees: 3, seed: 0, ..Default::default() },
        )
        .unwrap();
        assert!(forest_predict(&forest, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn score_is_vote_fraction() {
        let (features, labels) = separable_data(30);
        let cfg = ForestConfig { n_trees: 7, seed: 3, ..Default::default() };
        let forest = forest_train(&features, &labels, &cfg).unwrap();
        let (_, score) = forest_predict(&forest, &features[0]).unwrap();
        let scaled = score * 7.0;
        assert!((scaled - scaled.round()).abs() < 1e-12);
    }
}
