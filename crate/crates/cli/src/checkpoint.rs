//! Single-file JSON checkpoints: vocabulary, model parameters, optimizer
//! state, epoch counter, RNG state, and loss history.
//!
//! Field order is fixed by the struct definitions and floats serialize in
//! shortest round-trip form, so identical runs produce byte-identical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use dualkge_core::trainer::{BaselineState, DualModelState};
use dualkge_core::{ModelKind, Vocabulary};

use crate::error::{AppError, Result};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// Trained state: both dual models, or the single baseline model.
///
/// Externally tagged ({"dual": ...} / {"baseline": ...}): the RNG state
/// includes a u128 word position that serde's internal buffering (used by
/// other tag styles) cannot carry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainedState {
    Dual(DualModelState),
    Baseline(BaselineState),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    /// Stable name of the model kind (e.g. `transe_l1`).
    pub kind: String,
    /// Embedding dimension per model (the baseline stores its doubled value).
    pub dim: usize,
    pub entity_labels: Vec<String>,
    pub relation_labels: Vec<String>,
    pub state: TrainedState,
}

impl Checkpoint {
    pub fn for_dual(vocab: &Vocabulary, state: DualModelState) -> Self {
        Checkpoint {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            kind: state.pos_model.kind().name().to_string(),
            dim: state.pos_model.dim(),
            entity_labels: vocab.entity_labels().to_vec(),
            relation_labels: vocab.relation_labels().to_vec(),
            state: TrainedState::Dual(state),
        }
    }

    pub fn for_baseline(vocab: &Vocabulary, state: BaselineState) -> Self {
        Checkpoint {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            kind: state.model.kind().name().to_string(),
            dim: state.model.dim(),
            entity_labels: vocab.entity_labels().to_vec(),
            relation_labels: vocab.relation_labels().to_vec(),
            state: TrainedState::Baseline(state),
        }
    }

    pub fn model_kind(&self) -> Result<ModelKind> {
        ModelKind::parse(&self.kind).map_err(AppError::from)
    }

    /// Rebuild the vocabulary the checkpointed models are indexed by.
    pub fn vocabulary(&self) -> Result<Vocabulary> {
        Vocabulary::from_labels(self.entity_labels.clone(), self.relation_labels.clone())
            .map_err(AppError::from)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self).map_err(|e| AppError::Json {
            context: format!("serializing checkpoint {}", path.display()),
            source: e,
        })?;
        fs::write(path, json).map_err(|e| AppError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        let checkpoint: Checkpoint = serde_json::from_str(&content).map_err(|e| AppError::Json {
            context: format!("parsing checkpoint {}", path.display()),
            source: e,
        })?;
        if checkpoint.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(AppError::data(format!(
                "{}: unsupported checkpoint schema version {}",
                path.display(),
                checkpoint.schema_version
            )));
        }
        Ok(checkpoint)
    }
}
