//! Selecting an entity representation or triple scorer from a checkpoint.

use dualkge_core::Triple;

use crate::checkpoint::TrainedState;
use crate::cli::ReprArg;
use crate::error::{AppError, Result};

impl ReprArg {
    pub fn name(self) -> &'static str {
        match self {
            ReprArg::Pos => "pos",
            ReprArg::Neg => "neg",
            ReprArg::Concat => "concat",
        }
    }
}

/// Entity vector under the chosen representation.
///
/// Baseline checkpoints expose only `pos` (their single model).
pub fn entity_vector(state: &TrainedState, repr: ReprArg, entity: usize) -> Result<Vec<f64>> {
    match (state, repr) {
        (TrainedState::Dual(dual), ReprArg::Pos) => Ok(dual.pos_model.entity_row(entity).to_vec()),
        (TrainedState::Dual(dual), ReprArg::Neg) => Ok(dual.neg_model.entity_row(entity).to_vec()),
        (TrainedState::Dual(dual), ReprArg::Concat) => {
            dual.final_representation(entity).map_err(AppError::from)
        }
        (TrainedState::Baseline(base), ReprArg::Pos) => {
            Ok(base.model.entity_row(entity).to_vec())
        }
        (TrainedState::Baseline(_), other) => Err(AppError::usage(format!(
            "baseline checkpoints only provide --repr pos, not {}",
            other.name()
        ))),
    }
}

/// Number of entities the checkpointed model covers.
pub fn n_entities(state: &TrainedState) -> usize {
    match state {
        TrainedState::Dual(dual) => dual.pos_model.n_entities(),
        TrainedState::Baseline(base) => base.model.n_entities(),
    }
}

/// Triple scorer under the chosen representation.
///
/// `concat` sums the positive and negative model scores. That combination
/// has no standard definition for single-model scoring functions, so it is
/// flagged by the `experimental` field.
pub struct Scorer<'a> {
    func: Box<dyn Fn(&Triple) -> f64 + Sync + 'a>,
    pub experimental: bool,
}

impl Scorer<'_> {
    pub fn score(&self, triple: &Triple) -> f64 {
        (self.func)(triple)
    }

    pub fn as_fn(&self) -> &(dyn Fn(&Triple) -> f64 + Sync) {
        &*self.func
    }
}

pub fn make_scorer(state: &TrainedState, repr: ReprArg) -> Result<Scorer<'_>> {
    match (state, repr) {
        (TrainedState::Dual(dual), ReprArg::Pos) => {
            Ok(Scorer { func: Box::new(dual.pos_model.scorer()), experimental: false })
        }
        (TrainedState::Dual(dual), ReprArg::Neg) => {
            Ok(Scorer { func: Box::new(dual.neg_model.scorer()), experimental: false })
        }
        (TrainedState::Dual(dual), ReprArg::Concat) => {
            let pos = dual.pos_model.scorer();
            let neg = dual.neg_model.scorer();
            Ok(Scorer { func: Box::new(move |t: &Triple| pos(t) + neg(t)), experimental: true })
        }
        (TrainedState::Baseline(base), ReprArg::Pos) => {
            Ok(Scorer { func: Box::new(base.model.scorer()), experimental: false })
        }
        (TrainedState::Baseline(_), other) => Err(AppError::usage(format!(
            "baseline checkpoints only provide --repr pos, not {}",
            other.name()
        ))),
    }
}
