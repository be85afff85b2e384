//! Negative sample generation.
//!
//! Two strategies produce one corrupted triple per positive triple: uniform
//! random corruption for the warm-up epochs, and contrastive corruption where
//! every admissible replacement entity is scored by the *opposing* model and
//! the highest-scoring candidate wins.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, Slot, Triple};
use crate::model::EmbeddingModel;
use crate::parallel;
use crate::rng::SeededRng;

/// How a batch of negatives was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Provenance {
    Random,
    Contrastive,
}

/// Candidate pool size for contrastive corruption.
///
/// `All` scores every admissible entity. `Limit(n)` subsamples the pool to at
/// most `n` candidates, a scalability escape hatch that changes nothing when
/// `n` covers the whole pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PoolSize {
    All,
    Limit(usize),
}

/// One negative triple per positive triple, index-aligned with the owning
/// graph's triple list. Each sample differs from its positive in exactly one
/// slot (head xor tail).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeSampleSet {
    pub samples: Vec<Triple>,
    pub provenance: Provenance,
}

fn check_sampling_preconditions(kg: &KnowledgeGraph) -> Result<()> {
    if kg.unique_entities().len() < 2 {
        return Err(Error::Sampling(format!(
            "need at least 2 distinct entities to corrupt, graph has {}",
            kg.unique_entities().len()
        )));
    }
    Ok(())
}

/// Draw a uniform replacement for `original` from `pool`, excluding it.
///
/// `pool` is sorted, so the exclusion is a single binary search and exactly
/// one RNG draw is consumed.
fn draw_replacement(pool: &[usize], original: usize, rng: &mut SeededRng) -> usize {
    debug_assert!(pool.len() >= 2);
    match pool.binary_search(&original) {
        Ok(pos) => {
            let j = rng.gen_range(0..pool.len() - 1);
            if j >= pos {
                pool[j + 1]
            } else {
                pool[j]
            }
        }
        // Entity absent from the pool: nothing to exclude.
        Err(_) => pool[rng.gen_range(0..pool.len())],
    }
}

/// Corrupt every positive triple by replacing a fair-coin-chosen slot with a
/// uniformly drawn other entity of the graph.
pub fn random_corrupt(kg: &KnowledgeGraph, rng: &mut SeededRng) -> Result<NegativeSampleSet> {
    check_sampling_preconditions(kg)?;
    let pool = kg.unique_entities();
    let mut samples = Vec::with_capacity(kg.len());
    for triple in kg.triples() {
        let slot = if rng.gen::<bool>() { Slot::Head } else { Slot::Tail };
        let original = triple.slot_entity(slot);
        let replacement = draw_replacement(pool, original, rng);
        samples.push(triple.with_slot(slot, replacement));
    }
    Ok(NegativeSampleSet { samples, provenance: Provenance::Random })
}

/// Per-triple corruption plan, drawn sequentially so that scoring can run in
/// parallel without touching the RNG.
struct CorruptionPlan {
    triple: Triple,
    slot: Slot,
    /// Explicit candidate list when the pool was subsampled; `None` means the
    /// full admissible pool (all unique entities except the original).
    subsample: Option<Vec<usize>>,
}

/// Corrupt every positive triple with the admissible candidate that the
/// opposing model scores highest.
///
/// For each triple a fair coin picks head or tail; the candidate set is the
/// graph's unique entities minus the original slot entity, optionally
/// subsampled to `pool_size`; `contr_model` scores every candidate and the
/// argmax is emitted, ties broken by the smallest entity index.
pub fn contrastive_corrupt(
    kg: &KnowledgeGraph,
    contr_model: &EmbeddingModel,
    rng: &mut SeededRng,
    pool_size: PoolSize,
) -> Result<NegativeSampleSet> {
    check_sampling_preconditions(kg)?;
    if contr_model.n_entities() < kg.vocab().n_entities()
        || contr_model.n_relations() < kg.vocab().n_relations()
    {
        return Err(Error::arg(format!(
            "contrastive model covers {}x{} indices but the graph vocabulary needs {}x{}",
            contr_model.n_entities(),
            contr_model.n_relations(),
            kg.vocab().n_entities(),
            kg.vocab().n_relations()
        )));
    }
    let pool = kg.unique_entities();

    // Stage 1 (sequential): consume all randomness.
    let mut plans = Vec::with_capacity(kg.len());
    for triple in kg.triples() {
        let slot = if rng.gen::<bool>() { Slot::Head } else { Slot::Tail };
        let original = triple.slot_entity(slot);
        let subsample = match pool_size {
            PoolSize::All => None,
            PoolSize::Limit(limit) => {
                let admissible = pool.len() - usize::from(pool.binary_search(&original).is_ok());
                if limit >= admissible {
                    None
                } else {
                    Some(subsample_candidates(pool, original, limit, rng))
                }
            }
        };
        plans.push(CorruptionPlan { triple: *triple, slot, subsample });
    }

    // Stage 2 (parallel): score candidates and take the argmax per triple.
    let samples = parallel::map_slice(&plans, |plan| {
        let original = plan.triple.slot_entity(plan.slot);
        let best = match &plan.subsample {
            Some(candidates) => argmax_candidate(contr_model, &plan.triple, plan.slot, candidates.iter().copied()),
            None => argmax_candidate(
                contr_model,
                &plan.triple,
                plan.slot,
                pool.iter().copied().filter(|&c| c != original),
            ),
        };
        plan.triple.with_slot(plan.slot, best)
    });

    Ok(NegativeSampleSet { samples, provenance: Provenance::Contrastive })
}

/// Uniformly choose `limit` distinct candidates from `pool` minus `original`,
/// returned in ascending order.
fn subsample_candidates(
    pool: &[usize],
    original: usize,
    limit: usize,
    rng: &mut SeededRng,
) -> Vec<usize> {
    let mut admissible: Vec<usize> = pool.iter().copied().filter(|&c| c != original).collect();
    // Partial Fisher-Yates: the first `limit` positions end up a uniform
    // draw without replacement.
    for i in 0..limit {
        let j = rng.gen_range(i..admissible.len());
        admissible.swap(i, j);
    }
    admissible.truncate(limit);
    admissible.sort_unstable();
    admissible
}

/// Highest-scoring candidate; ties go to the smallest entity index.
///
/// Candidates must be supplied in ascending index order.
fn argmax_candidate(
    model: &EmbeddingModel,
    triple: &Triple,
    slot: Slot,
    candidates: impl Iterator<Item = usize>,
) -> usize {
    let mut best_entity = usize::MAX;
    let mut best_score = f64::NEG_INFINITY;
    for c in candidates {
        let s = model.score_unchecked(&triple.with_slot(slot, c));
        if s > best_score {
            best_score = s;
            best_entity = c;
        }
    }
    debug_assert_ne!(best_entity, usize::MAX);
    best_entity
}
