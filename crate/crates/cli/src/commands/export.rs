//! `export`: dump embeddings from a checkpoint as a labeled TSV.

use dualkge_core::EmbeddingModel;

use crate::checkpoint::{Checkpoint, TrainedState};
use crate::cli::{ExportArgs, ReprArg};
use crate::error::{AppError, Result};
use crate::formats::write_embeddings_tsv;

fn export_model(checkpoint: &Checkpoint, model: &EmbeddingModel, args: &ExportArgs) -> Result<()> {
    let entities = checkpoint
        .entity_labels
        .iter()
        .enumerate()
        .map(|(i, label)| (label.as_str(), model.entity_row(i)));
    let relations = checkpoint
        .relation_labels
        .iter()
        .enumerate()
        .map(|(i, label)| (label.as_str(), model.relation_row(i)));
    write_embeddings_tsv(&args.out, model.kind().name(), model.dim(), entities.chain(relations))
}

pub fn run(args: &ExportArgs) -> Result<()> {
    let checkpoint = Checkpoint::load(&args.checkpoint)?;
    match (&checkpoint.state, args.which) {
        (TrainedState::Dual(dual), ReprArg::Pos) => export_model(&checkpoint, &dual.pos_model, args)?,
        (TrainedState::Dual(dual), ReprArg::Neg) => export_model(&checkpoint, &dual.neg_model, args)?,
        (TrainedState::Dual(dual), ReprArg::Concat) => {
            // concatenation is an entity-level representation: no relations
            let rows: Vec<Vec<f64>> = (0..dual.pos_model.n_entities())
                .map(|e| dual.final_representation(e))
                .collect::<dualkge_core::Result<_>>()?;
            write_embeddings_tsv(
                &args.out,
                dual.pos_model.kind().name(),
                dual.pos_model.dim(),
                checkpoint
                    .entity_labels
                    .iter()
                    .zip(&rows)
                    .map(|(label, row)| (label.as_str(), row.as_slice())),
            )?;
        }
        (TrainedState::Baseline(base), ReprArg::Pos) => export_model(&checkpoint, &base.model, args)?,
        (TrainedState::Baseline(_), other) => {
            return Err(AppError::usage(format!(
                "baseline checkpoints only export --which pos, not {}",
                other.name()
            )))
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
