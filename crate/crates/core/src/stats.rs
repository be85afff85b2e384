//! Rank-based statistics: midrank assignment, the Kruskal-Wallis H test, and
//! the ROC AUC computed from the Mann-Whitney U statistic.

use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::{Error, Result};

/// Chi-square critical values at significance 0.05 for 1..=10 degrees of
/// freedom.
const CHI2_CRIT_005: [f64; 10] =
    [3.841, 5.991, 7.815, 9.488, 11.070, 12.592, 14.067, 15.507, 16.919, 18.307];

/// Result of a Kruskal-Wallis test.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KruskalWallis {
    pub h: f64,
    pub df: usize,
    pub critical_value: f64,
    /// True when H exceeds the critical value at significance 0.05.
    pub significant: bool,
}

/// 1-based midranks of `values`; tied values share the average of the ranks
/// they span.
pub fn assign_midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(core::cmp::Ordering::Equal));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let midrank = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = midrank;
        }
        i = j;
    }
    ranks
}

/// Kruskal-Wallis H with midranks and the standard tie correction; the
/// significance call compares H against the embedded chi-square table
/// (supported for 2 to 11 groups).
///
/// When every observation is identical the tie correction degenerates and H
/// is defined as 0 (not significant).
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalWallis> {
    if groups.len() < 2 {
        return Err(Error::arg("need at least 2 groups"));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::arg("every group must be non-empty"));
    }
    let df = groups.len() - 1;
    if df > CHI2_CRIT_005.len() {
        return Err(Error::Metric(format!(
            "critical-value table covers up to {} groups, got {}",
            CHI2_CRIT_005.len() + 1,
            groups.len()
        )));
    }
    let critical_value = CHI2_CRIT_005[df - 1];

    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n_total = all.len();
    let ranks = assign_midranks(&all);

    let mut h = 0.0;
    let mut offset = 0;
    for group in groups {
        let n_i = group.len() as f64;
        let r_i: f64 = ranks[offset..offset + group.len()].iter().sum();
        h += r_i * r_i / n_i;
        offset += group.len();
    }
    let n = n_total as f64;
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    // tie correction: 1 - sum(t^3 - t) / (N^3 - N)
    let mut sorted = all.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let correction = 1.0 - tie_term / (n * n * n - n);
    let h = if correction == 0.0 { 0.0 } else { h / correction };

    Ok(KruskalWallis { h, df, critical_value, significant: h > critical_value })
}

/// ROC AUC from scores via the rank statistic:
/// `U / (n_pos * n_neg)` with tied scores contributing one half.
pub fn auc_from_scores(labels: &[bool], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::arg("labels and scores must be aligned"));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metric("AUC needs both classes in the true labels".into()));
    }
    let ranks = assign_midranks(scores);
    let rank_sum_pos: f64 =
        ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos * n_neg) as f64)
}
