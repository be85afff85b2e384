//! Knowledge graph storage: vocabularies, triples, and split/filter operations.
//!
//! A single [`Vocabulary`] is shared by the positive and the negative graph so
//! that entity and relation indices are compatible when one model scores
//! corruptions of the other graph's triples.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};

use hashbrown::{HashMap, HashSet};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// A single (head, relation, tail) fact with dense integer indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

impl Triple {
    pub fn new(head: usize, relation: usize, tail: usize) -> Self {
        Triple { head, relation, tail }
    }

    /// The triple with the given slot replaced by `entity`.
    pub fn with_slot(self, slot: Slot, entity: usize) -> Self {
        match slot {
            Slot::Head => Triple { head: entity, ..self },
            Slot::Tail => Triple { tail: entity, ..self },
        }
    }

    /// The entity currently occupying `slot`.
    pub fn slot_entity(self, slot: Slot) -> usize {
        match slot {
            Slot::Head => self.head,
            Slot::Tail => self.tail,
        }
    }
}

/// Which entity position of a triple is being corrupted or predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Slot {
    Head,
    Tail,
}

/// Bijective label <-> dense index maps for entities and relations.
///
/// Indices are assigned in first-seen order, so parsing the same files in the
/// same order always yields the same indexing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entity_labels: Vec<String>,
    relation_labels: Vec<String>,
    entity_index: HashMap<String, usize>,
    relation_index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `label`, inserting it with the next dense index if unseen.
    pub fn intern_entity(&mut self, label: &str) -> usize {
        if let Some(&idx) = self.entity_index.get(label) {
            return idx;
        }
        let idx = self.entity_labels.len();
        self.entity_labels.push(String::from(label));
        self.entity_index.insert(String::from(label), idx);
        idx
    }

    /// Index of `label`, inserting it with the next dense index if unseen.
    pub fn intern_relation(&mut self, label: &str) -> usize {
        if let Some(&idx) = self.relation_index.get(label) {
            return idx;
        }
        let idx = self.relation_labels.len();
        self.relation_labels.push(String::from(label));
        self.relation_index.insert(String::from(label), idx);
        idx
    }

    pub fn entity(&self, label: &str) -> Option<usize> {
        self.entity_index.get(label).copied()
    }

    pub fn relation(&self, label: &str) -> Option<usize> {
        self.relation_index.get(label).copied()
    }

    pub fn entity_label(&self, idx: usize) -> Option<&str> {
        self.entity_labels.get(idx).map(String::as_str)
    }

    pub fn relation_label(&self, idx: usize) -> Option<&str> {
        self.relation_labels.get(idx).map(String::as_str)
    }

    pub fn n_entities(&self) -> usize {
        self.entity_labels.len()
    }

    pub fn n_relations(&self) -> usize {
        self.relation_labels.len()
    }

    pub fn entity_labels(&self) -> &[String] {
        &self.entity_labels
    }

    pub fn relation_labels(&self) -> &[String] {
        &self.relation_labels
    }

    /// Rebuild a vocabulary from label lists (e.g. a loaded checkpoint).
    ///
    /// Fails if either list contains duplicates, which would break the
    /// label <-> index bijection.
    pub fn from_labels(entities: Vec<String>, relations: Vec<String>) -> Result<Self> {
        let mut vocab = Vocabulary::new();
        for label in &entities {
            if vocab.entity(label).is_some() {
                return Err(Error::arg(format!("duplicate entity label {label:?}")));
            }
            vocab.intern_entity(label);
        }
        for label in &relations {
            if vocab.relation(label).is_some() {
                return Err(Error::arg(format!("duplicate relation label {label:?}")));
            }
            vocab.intern_relation(label);
        }
        Ok(vocab)
    }
}

/// An immutable set of triples over a shared vocabulary.
///
/// Construction deduplicates while preserving first-occurrence order and
/// precomputes the membership set and the sorted list of entities that
/// actually occur in the triples.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    vocab: Arc<Vocabulary>,
    triples: Vec<Triple>,
    triple_set: HashSet<Triple>,
    unique_entities: Vec<usize>,
}

impl KnowledgeGraph {
    /// Build a graph from raw triples, deduplicating in order.
    pub fn new(vocab: Arc<Vocabulary>, raw: Vec<Triple>) -> Result<Self> {
        let n_e = vocab.n_entities();
        let n_r = vocab.n_relations();
        let mut triples = Vec::with_capacity(raw.len());
        let mut triple_set = HashSet::with_capacity(raw.len());
        let mut entity_seen: HashSet<usize> = HashSet::new();
        for t in raw {
            if t.head >= n_e || t.tail >= n_e {
                return Err(Error::arg(format!(
                    "triple ({}, {}, {}) references entity outside vocabulary of size {n_e}",
                    t.head, t.relation, t.tail
                )));
            }
            if t.relation >= n_r {
                return Err(Error::arg(format!(
                    "triple ({}, {}, {}) references relation outside vocabulary of size {n_r}",
                    t.head, t.relation, t.tail
                )));
            }
            if triple_set.insert(t) {
                triples.push(t);
                entity_seen.insert(t.head);
                entity_seen.insert(t.tail);
            }
        }
        let mut unique_entities: Vec<usize> = entity_seen.into_iter().collect();
        unique_entities.sort_unstable();
        Ok(KnowledgeGraph { vocab, triples, triple_set, unique_entities })
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triple_set.contains(triple)
    }

    pub fn triple_set(&self) -> &HashSet<Triple> {
        &self.triple_set
    }

    /// Entities that occur as head or tail of at least one triple, sorted.
    pub fn unique_entities(&self) -> &[usize] {
        &self.unique_entities
    }

    /// True if both graphs are indexed by the same vocabulary.
    pub fn shares_vocab_with(&self, other: &KnowledgeGraph) -> bool {
        Arc::ptr_eq(&self.vocab, &other.vocab) || self.vocab == other.vocab
    }
}

/// Keep only the positive triples (h, r, t) whose (h, r) pair occurs in the
/// negative graph.
///
/// This is the dataset-construction rule that guarantees every retained head
/// entity carries both positive and negative evidence for the relation.
pub fn build_dataset_filter(pos: &KnowledgeGraph, neg: &KnowledgeGraph) -> Result<KnowledgeGraph> {
    if !pos.shares_vocab_with(neg) {
        return Err(Error::arg("positive and negative graphs must share one vocabulary"));
    }
    let neg_head_rel: HashSet<(usize, usize)> =
        neg.triples().iter().map(|t| (t.head, t.relation)).collect();
    let kept: Vec<Triple> = pos
        .triples()
        .iter()
        .copied()
        .filter(|t| neg_head_rel.contains(&(t.head, t.relation)))
        .collect();
    KnowledgeGraph::new(pos.vocab.clone(), kept)
}

/// Split a graph into train and test parts such that no entity or relation is
/// exclusive to the test set.
///
/// Triples are visited in a seed-shuffled order; one moves to the test set
/// only while the test set is below `ceil(test_fraction * |kg|)` and every
/// entity and relation it mentions still occurs in at least one other triple
/// remaining in the training set.
pub fn split_train_test(
    kg: &KnowledgeGraph,
    test_fraction: f64,
    seed: u64,
) -> Result<(KnowledgeGraph, KnowledgeGraph)> {
    if kg.is_empty() {
        return Err(Error::arg("cannot split an empty knowledge graph"));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::arg(format!(
            "test_fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n = kg.len();
    let target = (crate::math::ceil(test_fraction * n as f64) as usize).min(n);

    // Occurrence counts over triples still assigned to train. An entity that
    // appears as both head and tail of one triple counts once for it.
    let n_entities = kg.vocab.n_entities();
    let n_relations = kg.vocab.n_relations();
    let mut entity_occ = vec![0usize; n_entities];
    let mut relation_occ = vec![0usize; n_relations];
    for t in kg.triples() {
        entity_occ[t.head] += 1;
        if t.tail != t.head {
            entity_occ[t.tail] += 1;
        }
        relation_occ[t.relation] += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(seed));

    let mut in_test = vec![false; n];
    let mut test_count = 0usize;
    for &i in &order {
        if test_count >= target {
            break;
        }
        let t = kg.triples()[i];
        let movable = entity_occ[t.head] >= 2
            && entity_occ[t.tail] >= 2
            && relation_occ[t.relation] >= 2;
        if movable {
            entity_occ[t.head] -= 1;
            if t.tail != t.head {
                entity_occ[t.tail] -= 1;
            }
            relation_occ[t.relation] -= 1;
            in_test[i] = true;
            test_count += 1;
        }
    }

    let mut train = Vec::with_capacity(n - test_count);
    let mut test = Vec::with_capacity(test_count);
    for (i, t) in kg.triples().iter().enumerate() {
        if in_test[i] {
            test.push(*t);
        } else {
            train.push(*t);
        }
    }
    Ok((
        KnowledgeGraph::new(kg.vocab.clone(), train)?,
        KnowledgeGraph::new(kg.vocab.clone(), test)?,
    ))
}

/// Partial map from entity index to a semantic type label.
#[derive(Debug, Clone, Default)]
pub struct TypeMap {
    type_labels: Vec<String>,
    entity_type: HashMap<usize, usize>,
}

impl TypeMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assign `type_label` to `entity`.
    ///
    /// Re-assigning the same type is a no-op; a conflicting type is an error,
    /// since a typed entity must have exactly one type.
    pub fn assign(&mut self, entity: usize, type_label: &str) -> Result<()> {
        let type_id = match self.type_labels.iter().position(|l| l == type_label) {
            Some(id) => id,
            None => {
                self.type_labels.push(String::from(type_label));
                self.type_labels.len() - 1
            }
        };
        match self.entity_type.get(&entity) {
            Some(&existing) if existing != type_id => Err(Error::arg(format!(
                "entity {entity} mapped to conflicting types {:?} and {type_label:?}",
                self.type_labels[existing]
            ))),
            _ => {
                self.entity_type.insert(entity, type_id);
                Ok(())
            }
        }
    }

    /// The dense id of the entity's type, if the entity is typed.
    pub fn type_id(&self, entity: usize) -> Option<usize> {
        self.entity_type.get(&entity).copied()
    }

    pub fn type_label(&self, entity: usize) -> Option<&str> {
        self.type_id(entity).map(|id| self.type_labels[id].as_str())
    }

    pub fn type_labels(&self) -> &[String] {
        &self.type_labels
    }

    pub fn n_typed(&self) -> usize {
        self.entity_type.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity_type.is_empty()
    }

    /// Typed entities in ascending index order with their type ids.
    pub fn typed_entities(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> =
            self.entity_type.iter().map(|(&e, &t)| (e, t)).collect();
        pairs.sort_unstable();
        pairs
    }
}
