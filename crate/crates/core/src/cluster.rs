//! Embedding-space clustering diagnostics over given type labels.
//!
//! No clustering is performed; the labels ARE the clusters, and the metrics
//! quantify how well the embedding separates them. All distances are
//! Euclidean.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::{Error, Result};
use crate::math::{euclidean, squared_distance};

/// The three separation scores. Calinski-Harabasz and silhouette are
/// higher-is-better, Davies-Bouldin is lower-is-better.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusteringMetrics {
    pub calinski_harabasz: f64,
    pub davies_bouldin: f64,
    pub silhouette: f64,
}

fn centroid(rows: &[Vec<f64>], members: &[usize]) -> Vec<f64> {
    let width = rows[members[0]].len();
    let mut c = vec![0.0; width];
    for &i in members {
        for (acc, v) in c.iter_mut().zip(&rows[i]) {
            *acc += v;
        }
    }
    for v in c.iter_mut() {
        *v /= members.len() as f64;
    }
    c
}

/// Calinski-Harabasz, Davies-Bouldin, and mean silhouette of `embeddings`
/// grouped by `labels`.
///
/// Requires at least two distinct labels. Points in singleton clusters get
/// silhouette 0. When the within-cluster scatter is exactly zero the
/// Calinski-Harabasz ratio is degenerate and reported as 1.
pub fn clustering_metrics(embeddings: &[Vec<f64>], labels: &[usize]) -> Result<ClusteringMetrics> {
    if embeddings.len() != labels.len() {
        return Err(Error::arg(format!(
            "{} embeddings vs {} labels",
            embeddings.len(),
            labels.len()
        )));
    }
    if embeddings.is_empty() {
        return Err(Error::arg("need at least one embedding"));
    }
    let width = embeddings[0].len();
    if embeddings.iter().any(|e| e.len() != width) {
        return Err(Error::arg("embedding rows must share one width"));
    }

    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        clusters.entry(label).or_default().push(i);
    }
    let k = clusters.len();
    if k < 2 {
        return Err(Error::Metric("clustering metrics need at least 2 distinct labels".into()));
    }
    let n = embeddings.len();
    let members: Vec<&Vec<usize>> = clusters.values().collect();
    let centroids: Vec<Vec<f64>> = members.iter().map(|m| centroid(embeddings, m)).collect();
    let global = centroid(embeddings, &(0..n).collect::<Vec<_>>());

    // Calinski-Harabasz
    let mut between = 0.0;
    let mut within = 0.0;
    for (c, m) in centroids.iter().zip(&members) {
        between += m.len() as f64 * squared_distance(c, &global);
        for &i in m.iter() {
            within += squared_distance(&embeddings[i], c);
        }
    }
    let calinski_harabasz = if within == 0.0 {
        1.0
    } else {
        (between / (k - 1) as f64) / (within / (n - k) as f64)
    };

    // Davies-Bouldin
    let scatter: Vec<f64> = centroids
        .iter()
        .zip(&members)
        .map(|(c, m)| m.iter().map(|&i| euclidean(&embeddings[i], c)).sum::<f64>() / m.len() as f64)
        .collect();
    let mut db_sum = 0.0;
    for i in 0..k {
        let mut worst = 0.0f64;
        for j in 0..k {
            if i == j {
                continue;
            }
            let d = euclidean(&centroids[i], &centroids[j]);
            let ratio = if d == 0.0 {
                if scatter[i] + scatter[j] == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (scatter[i] + scatter[j]) / d
            };
            worst = worst.max(ratio);
        }
        db_sum += worst;
    }
    let davies_bouldin = db_sum / k as f64;

    // Silhouette
    let cluster_of: Vec<usize> = {
        let mut map = vec![0usize; n];
        for (cid, m) in members.iter().enumerate() {
            for &i in m.iter() {
                map[i] = cid;
            }
        }
        map
    };
    let mut silhouette_sum = 0.0;
    for i in 0..n {
        let own = cluster_of[i];
        let own_size = members[own].len();
        if own_size == 1 {
            continue; // singleton contributes 0
        }
        let a = members[own]
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| euclidean(&embeddings[i], &embeddings[j]))
            .sum::<f64>()
            / (own_size - 1) as f64;
        let mut b = f64::INFINITY;
        for (cid, m) in members.iter().enumerate() {
            if cid == own {
                continue;
            }
            let mean = m.iter().map(|&j| euclidean(&embeddings[i], &embeddings[j])).sum::<f64>()
                / m.len() as f64;
            b = b.min(mean);
        }
        let denom = a.max(b);
        if denom > 0.0 {
            silhouette_sum += (b - a) / denom;
        }
    }
    let silhouette = silhouette_sum / n as f64;

    Ok(ClusteringMetrics { calinski_harabasz, davies_bouldin, silhouette })
}

/// Min-max normalize a set of clustering results for side-by-side comparison.
///
/// Each metric is mapped to [0, 1] across the rows, with Davies-Bouldin
/// inverted first so that higher is better everywhere; the worst row per
/// metric lands at exactly 0. With a single row (or equal values) the
/// normalized value is 0.
pub fn normalize_metric_table(rows: &[ClusteringMetrics]) -> Vec<NormalizedClusteringMetrics> {
    fn min_max(values: Vec<f64>) -> Vec<f64> {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        values
            .into_iter()
            .map(|v| if span > 0.0 { (v - min) / span } else { 0.0 })
            .collect()
    }
    let ch = min_max(rows.iter().map(|m| m.calinski_harabasz).collect());
    let db = min_max(rows.iter().map(|m| -m.davies_bouldin).collect());
    let sil = min_max(rows.iter().map(|m| m.silhouette).collect());
    (0..rows.len())
        .map(|i| NormalizedClusteringMetrics {
            calinski_harabasz: ch[i],
            davies_bouldin_inverted: db[i],
            silhouette: sil[i],
        })
        .collect()
}

/// One row of the [0, 1]-normalized comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizedClusteringMetrics {
    pub calinski_harabasz: f64,
    /// Davies-Bouldin after inversion: 1 is the best (lowest) raw value.
    pub davies_bouldin_inverted: f64,
    pub silhouette: f64,
}
