//! Filtered link-prediction ranking and type-aware top-K evaluation.
//!
//! For every test triple, corruptions of the head and of the tail slot are
//! scored; corruptions that reproduce a known-true triple (other than the
//! test triple itself) are removed before ranking. Reported per direction and
//! averaged: mean reciprocal rank, Hits@K, and the fraction of top-K
//! predictions whose entity shares the ground-truth entity's semantic type.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, Slot, Triple, TypeMap};
use crate::parallel;

/// Which known-true triples are removed from a candidate pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FilterMode {
    /// Remove corruptions present in train or test (minus the query).
    TrainAndTest,
    /// Remove only corruptions present in the training set.
    TrainOnly,
    /// No filtering ("raw" ranking).
    Raw,
}

/// How candidates tied with the test triple's score affect the rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TieBreak {
    /// Rank = 1 + number of strictly better candidates.
    Optimistic,
    /// Rank = 1 + strictly better + half the ties (mean-rank convention).
    Mean,
}

/// Evaluation options shared by ranking and Sem@K.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub filter: FilterMode,
    pub tie: TieBreak,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { filter: FilterMode::TrainAndTest, tie: TieBreak::Optimistic }
    }
}

/// A metric reported for head prediction, tail prediction, and their mean.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Directional {
    pub head: f64,
    pub tail: f64,
    pub avg: f64,
}

impl Directional {
    fn new(head: f64, tail: f64) -> Self {
        Directional { head, tail, avg: 0.5 * (head + tail) }
    }
}

/// Link-prediction ranking metrics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankingReport {
    pub mrr_head: f64,
    pub mrr_tail: f64,
    pub mrr_avg: f64,
    pub hits: BTreeMap<usize, Directional>,
    pub n_test: usize,
}

/// Semantic-awareness metrics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SemReport {
    pub sem: BTreeMap<usize, Directional>,
    /// Queries with a typed ground-truth head entity.
    pub n_scored_head: usize,
    /// Queries with a typed ground-truth tail entity.
    pub n_scored_tail: usize,
    /// True when some candidate pool was smaller than the largest K, in which
    /// case the per-query sum is still divided by K.
    pub pool_truncated: bool,
}

/// Rank of `test_triple` among corruptions of `slot`.
///
/// Candidates are all entities substituted into the slot; a candidate is
/// removed when the resulting triple is in `known_triples` and differs from
/// the test triple. The rank counts remaining candidates scoring strictly
/// higher than the test triple, plus one; with [`TieBreak::Mean`], tied
/// candidates add half a rank each.
pub fn rank_filtered(
    scorer: &(impl Fn(&Triple) -> f64 + ?Sized),
    test_triple: &Triple,
    slot: Slot,
    all_entities: &[usize],
    known_triples: &HashSet<Triple>,
    tie: TieBreak,
) -> f64 {
    let test_score = scorer(test_triple);
    let mut greater = 0usize;
    let mut tied = 0usize;
    for &candidate in all_entities {
        let corrupted = test_triple.with_slot(slot, candidate);
        if corrupted == *test_triple {
            continue;
        }
        if known_triples.contains(&corrupted) {
            continue;
        }
        let s = scorer(&corrupted);
        if s > test_score {
            greater += 1;
        } else if s == test_score {
            tied += 1;
        }
    }
    match tie {
        TieBreak::Optimistic => (1 + greater) as f64,
        TieBreak::Mean => 1.0 + greater as f64 + 0.5 * tied as f64,
    }
}

fn known_set(test: &KnowledgeGraph, train: &KnowledgeGraph, filter: FilterMode) -> HashSet<Triple> {
    match filter {
        FilterMode::TrainAndTest => {
            let mut set = train.triple_set().clone();
            set.extend(test.triples().iter().copied());
            set
        }
        FilterMode::TrainOnly => train.triple_set().clone(),
        FilterMode::Raw => HashSet::new(),
    }
}

/// Entities eligible as corruption candidates: everything occurring in the
/// train or test triples, ascending.
fn candidate_entities(test: &KnowledgeGraph, train: &KnowledgeGraph) -> Vec<usize> {
    let mut set: HashSet<usize> = train.unique_entities().iter().copied().collect();
    set.extend(test.unique_entities().iter().copied());
    let mut out: Vec<usize> = set.into_iter().collect();
    out.sort_unstable();
    out
}

/// Filtered MRR and Hits@K over a test graph.
pub fn evaluate_link_prediction(
    scorer: &(impl Fn(&Triple) -> f64 + Sync + ?Sized),
    test: &KnowledgeGraph,
    train: &KnowledgeGraph,
    ks: &[usize],
    options: EvalOptions,
) -> Result<RankingReport> {
    if test.is_empty() {
        return Err(Error::arg("test set must be non-empty"));
    }
    if !test.shares_vocab_with(train) {
        return Err(Error::arg("test and train graphs must share one vocabulary"));
    }
    let known = known_set(test, train, options.filter);
    let entities = candidate_entities(test, train);

    let ranks: Vec<(f64, f64)> = parallel::map_slice(test.triples(), |triple| {
        let head_rank = rank_filtered(scorer, triple, Slot::Head, &entities, &known, options.tie);
        let tail_rank = rank_filtered(scorer, triple, Slot::Tail, &entities, &known, options.tie);
        (head_rank, tail_rank)
    });

    let n = ranks.len() as f64;
    let mut mrr_head = 0.0;
    let mut mrr_tail = 0.0;
    for &(h, t) in &ranks {
        mrr_head += 1.0 / h;
        mrr_tail += 1.0 / t;
    }
    mrr_head /= n;
    mrr_tail /= n;

    let mut hits = BTreeMap::new();
    for &k in ks {
        let head = ranks.iter().filter(|(h, _)| *h <= k as f64).count() as f64 / n;
        let tail = ranks.iter().filter(|(_, t)| *t <= k as f64).count() as f64 / n;
        hits.insert(k, Directional::new(head, tail));
    }

    Ok(RankingReport {
        mrr_head,
        mrr_tail,
        mrr_avg: 0.5 * (mrr_head + mrr_tail),
        hits,
        n_test: test.len(),
    })
}

/// The top-`k` candidate entities for one query direction, using the same
/// candidate pool and filtering as ranking. Ordered by descending score with
/// ties broken by ascending entity index.
fn top_k_candidates(
    scorer: &(impl Fn(&Triple) -> f64 + ?Sized),
    test_triple: &Triple,
    slot: Slot,
    all_entities: &[usize],
    known: &HashSet<Triple>,
    k: usize,
) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = Vec::with_capacity(all_entities.len());
    for &candidate in all_entities {
        let corrupted = test_triple.with_slot(slot, candidate);
        if corrupted != *test_triple && known.contains(&corrupted) {
            continue;
        }
        scored.push((scorer(&corrupted), candidate));
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    scored.truncate(k);
    scored.into_iter().map(|(_, e)| e).collect()
}

/// Sem@K: the average fraction of top-K predictions whose predicted entity
/// has the same type as the ground-truth entity.
///
/// Queries whose ground-truth entity is untyped are excluded; untyped
/// predicted entities count as incompatible. When a filtered pool holds
/// fewer than K candidates the sum is still divided by K and
/// `pool_truncated` is set.
pub fn sem_at_k(
    scorer: &(impl Fn(&Triple) -> f64 + Sync + ?Sized),
    test: &KnowledgeGraph,
    train: &KnowledgeGraph,
    types: &TypeMap,
    k: usize,
    options: EvalOptions,
) -> Result<SemReport> {
    sem_at_ks(scorer, test, train, types, &[k], options)
}

/// [`sem_at_k`] for several K values in one pass.
pub fn sem_at_ks(
    scorer: &(impl Fn(&Triple) -> f64 + Sync + ?Sized),
    test: &KnowledgeGraph,
    train: &KnowledgeGraph,
    types: &TypeMap,
    ks: &[usize],
    options: EvalOptions,
) -> Result<SemReport> {
    if test.is_empty() {
        return Err(Error::arg("test set must be non-empty"));
    }
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::arg("K values must be positive"));
    }
    if !test.shares_vocab_with(train) {
        return Err(Error::arg("test and train graphs must share one vocabulary"));
    }
    let known = known_set(test, train, options.filter);
    let entities = candidate_entities(test, train);
    let max_k = ks.iter().copied().max().unwrap_or(1);

    // Per query and direction: the types of the top-max_k predictions
    // (None = untyped) plus the pool size, or None when the ground truth
    // is untyped.
    type QueryTop = Option<(Vec<Option<usize>>, usize)>;
    let per_query: Vec<(QueryTop, QueryTop)> = parallel::map_slice(test.triples(), |triple| {
        let one = |slot: Slot| -> QueryTop {
            // only queries with a typed ground-truth entity are scored
            types.type_id(triple.slot_entity(slot))?;
            let top = top_k_candidates(scorer, triple, slot, &entities, &known, max_k);
            let pool = top.len();
            Some((top.into_iter().map(|e| types.type_id(e)).collect(), pool))
        };
        (one(Slot::Head), one(Slot::Tail))
    });

    let mut pool_truncated = false;
    let mut sem = BTreeMap::new();
    for &k in ks {
        let mut sums = [0.0f64; 2];
        let mut counts = [0usize; 2];
        for (i, triple) in test.triples().iter().enumerate() {
            let sides = [&per_query[i].0, &per_query[i].1];
            for (d, side) in sides.iter().enumerate() {
                if let Some((top_types, _pool)) = side {
                    let slot = if d == 0 { Slot::Head } else { Slot::Tail };
                    let truth = types.type_id(triple.slot_entity(slot));
                    let available = top_types.len().min(k);
                    if available < k {
                        pool_truncated = true;
                    }
                    let compatible = top_types[..available]
                        .iter()
                        .filter(|t| t.is_some() && **t == truth)
                        .count();
                    sums[d] += compatible as f64 / k as f64;
                    counts[d] += 1;
                }
            }
        }
        let head = if counts[0] > 0 { sums[0] / counts[0] as f64 } else { 0.0 };
        let tail = if counts[1] > 0 { sums[1] / counts[1] as f64 } else { 0.0 };
        sem.insert(k, Directional::new(head, tail));
    }

    let n_scored_head = per_query.iter().filter(|(h, _)| h.is_some()).count();
    let n_scored_tail = per_query.iter().filter(|(_, t)| t.is_some()).count();
    Ok(SemReport { sem, n_scored_head, n_scored_tail, pool_truncated })
}
