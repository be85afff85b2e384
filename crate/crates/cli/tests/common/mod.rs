//! Synthetic block-structured knowledge graphs for integration tests.
//!
//! Entities are partitioned into groups; each relation connects one source
//! group to one destination group. Positive triples respect the signatures,
//! negative statements deliberately violate the destination group, so a model
//! can actually generalize from train to test.

use std::path::Path;

use rand::Rng;

use dualkge_core::rng::rng_from_seed;
use dualkge_core::{KnowledgeGraph, Triple, Vocabulary};

pub struct SyntheticData {
    pub pos: KnowledgeGraph,
    pub neg: KnowledgeGraph,
}

pub fn synthetic_kgs(
    n_entities: usize,
    n_groups: usize,
    n_relations: usize,
    n_pos: usize,
    n_neg: usize,
    seed: u64,
) -> SyntheticData {
    assert_eq!(n_entities % n_groups, 0, "groups must tile the entity set");
    let group_size = n_entities / n_groups;
    let mut vocab = Vocabulary::new();
    for i in 0..n_entities {
        vocab.intern_entity(&format!("e{i}"));
    }
    for i in 0..n_relations {
        vocab.intern_relation(&format!("r{i}"));
    }
    let vocab = std::sync::Arc::new(vocab);

    let mut rng = rng_from_seed(seed);
    let pick = |g: usize, rng: &mut dualkge_core::rng::SeededRng| {
        g * group_size + rng.gen_range(0..group_size)
    };

    let mut pos_set = std::collections::BTreeSet::new();
    let mut attempts = 0;
    while pos_set.len() < n_pos && attempts < 100 * n_pos {
        attempts += 1;
        let r = rng.gen_range(0..n_relations);
        let src = r % n_groups;
        let dst = (r + 1) % n_groups;
        let h = pick(src, &mut rng);
        let t = pick(dst, &mut rng);
        pos_set.insert(Triple::new(h, r, t));
    }

    let mut neg_set = std::collections::BTreeSet::new();
    attempts = 0;
    while neg_set.len() < n_neg && attempts < 100 * n_neg {
        attempts += 1;
        let r = rng.gen_range(0..n_relations);
        let src = r % n_groups;
        let dst = (r + 1) % n_groups;
        // a tail from any group other than the true destination
        let mut wrong = rng.gen_range(0..n_groups - 1);
        if wrong >= dst {
            wrong += 1;
        }
        let h = pick(src, &mut rng);
        let t = pick(wrong, &mut rng);
        neg_set.insert(Triple::new(h, r, t));
    }

    let pos = KnowledgeGraph::new(vocab.clone(), pos_set.into_iter().collect()).unwrap();
    let neg = KnowledgeGraph::new(vocab.clone(), neg_set.into_iter().collect()).unwrap();
    SyntheticData { pos, neg }
}

#[allow(dead_code)]
pub fn write_kg(kg: &KnowledgeGraph, path: &Path) {
    dualkge::formats::write_triples_tsv(kg.triples(), kg.vocab(), path).unwrap();
}
