//! `build-dataset`: filter positives by negative (head, relation) evidence,
//! split into train/test, and write the three TSVs.

use std::fs;
use std::sync::Arc;

use dualkge_core::graph::{build_dataset_filter, split_train_test};
use dualkge_core::{KnowledgeGraph, Vocabulary};

use crate::cli::BuildDatasetArgs;
use crate::error::{AppError, Result};
use crate::formats::{parse_triples, write_triples_tsv};

pub fn run(args: &BuildDatasetArgs) -> Result<()> {
    if !(args.test_fraction > 0.0 && args.test_fraction < 1.0) {
        return Err(AppError::usage(format!(
            "--test-fraction must lie in (0, 1), got {}",
            args.test_fraction
        )));
    }
    fs::create_dir_all(&args.out_dir).map_err(|e| AppError::io(&args.out_dir, e))?;

    let mut vocab = Vocabulary::new();
    let pos_raw = parse_triples(&args.pos, &mut vocab)?;
    let neg_raw = parse_triples(&args.neg, &mut vocab)?;
    let vocab = Arc::new(vocab);
    let pos = KnowledgeGraph::new(vocab.clone(), pos_raw)?;
    let neg = KnowledgeGraph::new(vocab.clone(), neg_raw)?;

    let filtered = build_dataset_filter(&pos, &neg)?;
    let (train, test) = if filtered.is_empty() {
        eprintln!(
            "warning: no positive triple shares a (head, relation) pair with a negative \
             statement; the filtered dataset is empty"
        );
        let empty = KnowledgeGraph::new(vocab.clone(), Vec::new())?;
        (empty.clone(), empty)
    } else {
        split_train_test(&filtered, args.test_fraction, args.seed)?
    };

    let train_pos_path = args.out_dir.join("train_pos.tsv");
    let test_pos_path = args.out_dir.join("test_pos.tsv");
    let train_neg_path = args.out_dir.join("train_neg.tsv");
    write_triples_tsv(train.triples(), &vocab, &train_pos_path)?;
    write_triples_tsv(test.triples(), &vocab, &test_pos_path)?;
    write_triples_tsv(neg.triples(), &vocab, &train_neg_path)?;

    println!("train_pos={} train_neg={} test_pos={}", train.len(), neg.len(), test.len());
    Ok(())
}
