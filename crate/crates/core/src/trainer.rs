//! The lockstep dual training loop and the single-model baseline.
//!
//! Each epoch both models first obtain a fresh negative sample set — random
//! corruption up to and including `cl_phase`, contrastive corruption against
//! the *other* model afterwards — and then take one full pass over their own
//! positives in seed-shuffled mini-batches. Sample generation for both models
//! happens before either model steps, so contrastive scoring always reads the
//! opposing parameters as they stood at the end of the previous epoch.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use alloc::{format, vec};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, Triple};
use crate::math;
use crate::model::{init_model, EmbeddingModel, ModelKind};
use crate::rng::{derive_seed, rng_from_seed, SeededRng};
use crate::sampling::{contrastive_corrupt, random_corrupt, NegativeSampleSet, PoolSize, Provenance};

/// Optimizer used for per-batch parameter updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Optimizer {
    Sgd,
    Adagrad,
}

impl Optimizer {
    /// The customary pairing: SGD for TransE, Adagrad for the bilinear models.
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::TransE { .. } => Optimizer::Sgd,
            _ => Optimizer::Adagrad,
        }
    }
}

/// Every hyperparameter of a training run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub dim: usize,
    pub epochs: usize,
    pub n_batches: usize,
    /// Negatives per positive. Only 1 is supported.
    pub neg_rate: usize,
    /// Epoch threshold: epochs strictly greater than this use contrastive
    /// negatives. A value >= `epochs` means the contrastive phase never runs.
    pub cl_phase: usize,
    pub learning_rate: f64,
    /// Margin of the ranking loss (TransE only).
    pub margin: f64,
    /// L2 penalty weight on the parameter rows a batch touches
    /// (DistMult/ComplEx only).
    pub reg_lambda: f64,
    pub optimizer: Optimizer,
    pub seed: u64,
    pub pool_size: PoolSize,
    /// Project TransE entity rows onto the unit ball at the start of each
    /// epoch.
    pub normalize_entities: bool,
    /// Regenerate contrastive samples every this many contrastive epochs;
    /// in between, the previous sets are reused.
    pub contrastive_every: usize,
}

impl TrainConfig {
    /// Defaults: 400 epochs, 100 batches, switch at epoch 350, dimension 50,
    /// margin 1.0, lambda 1e-5, learning rate and optimizer chosen per kind
    /// (0.01/SGD for TransE, 0.1/Adagrad otherwise).
    pub fn defaults_for(kind: ModelKind) -> Self {
        let learning_rate = match kind {
            ModelKind::TransE { .. } => 0.01,
            _ => 0.1,
        };
        TrainConfig {
            kind,
            dim: 50,
            epochs: 400,
            n_batches: 100,
            neg_rate: 1,
            cl_phase: 350,
            learning_rate,
            margin: 1.0,
            reg_lambda: 1e-5,
            optimizer: Optimizer::default_for(kind),
            seed: 42,
            pool_size: PoolSize::All,
            normalize_entities: false,
            contrastive_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        if self.dim == 0 {
            return Err(Error::arg("dim must be at least 1"));
        }
        if self.n_batches == 0 {
            return Err(Error::arg("n_batches must be at least 1"));
        }
        if self.neg_rate != 1 {
            return Err(Error::arg(format!(
                "only a negative sampling rate of 1 is supported, got {}",
                self.neg_rate
            )));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::arg("learning_rate must be positive and finite"));
        }
        if !self.margin.is_finite() || self.margin <= 0.0 {
            return Err(Error::arg("margin must be positive and finite"));
        }
        if !self.reg_lambda.is_finite() || self.reg_lambda < 0.0 {
            return Err(Error::arg("reg_lambda must be non-negative and finite"));
        }
        if self.contrastive_every == 0 {
            return Err(Error::arg("contrastive_every must be at least 1"));
        }
        if let PoolSize::Limit(0) = self.pool_size {
            return Err(Error::arg("pool size limit must be at least 1"));
        }
        Ok(())
    }
}

/// Loss and provenance record for one completed epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochRecord {
    /// 1-based epoch number.
    pub epoch: usize,
    pub loss_pos: f64,
    pub loss_neg: f64,
    pub provenance: Provenance,
}

/// The two models plus bookkeeping after (or during) dual training.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DualModelState {
    pub pos_model: EmbeddingModel,
    pub neg_model: EmbeddingModel,
    /// Number of completed epochs.
    pub epoch: usize,
    /// Master RNG; four per-epoch sub-seeds are drawn from it.
    pub rng: SeededRng,
    pub loss_history: Vec<EpochRecord>,
}

impl DualModelState {
    /// Concatenated `[pos_row, neg_row]` representation of an entity.
    pub fn final_representation(&self, entity: usize) -> Result<Vec<f64>> {
        if entity >= self.pos_model.n_entities() {
            return Err(Error::arg(format!(
                "entity index {} out of range ({} entities)",
                entity,
                self.pos_model.n_entities()
            )));
        }
        let pos = self.pos_model.entity_row(entity);
        let neg = self.neg_model.entity_row(entity);
        let mut out = Vec::with_capacity(pos.len() + neg.len());
        out.extend_from_slice(pos);
        out.extend_from_slice(neg);
        Ok(out)
    }
}

/// Single-model training result, used by the baseline mode.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaselineState {
    pub model: EmbeddingModel,
    pub epoch: usize,
    pub rng: SeededRng,
    /// Per-epoch training loss.
    pub loss_history: Vec<f64>,
}

/// Batch gradients accumulated per parameter row.
///
/// Rows are keyed by index in ordered maps so the update sweep is
/// deterministic.
#[derive(Debug, Clone, Default)]
pub struct SparseGrads {
    pub entity: BTreeMap<usize, Vec<f64>>,
    pub relation: BTreeMap<usize, Vec<f64>>,
}

impl SparseGrads {
    fn add_entity(&mut self, idx: usize, grad: &[f64], scale: f64) {
        let row = self.entity.entry(idx).or_insert_with(|| vec![0.0; grad.len()]);
        for (acc, g) in row.iter_mut().zip(grad) {
            *acc += scale * g;
        }
    }

    fn add_relation(&mut self, idx: usize, grad: &[f64], scale: f64) {
        let row = self.relation.entry(idx).or_insert_with(|| vec![0.0; grad.len()]);
        for (acc, g) in row.iter_mut().zip(grad) {
            *acc += scale * g;
        }
    }

    /// Add the model's own parameter row times `scale` (for L2 penalties).
    fn add_row_penalty(&mut self, model: &EmbeddingModel, triple: &Triple, scale: f64) {
        self.add_entity(triple.head, model.entity_row(triple.head), scale);
        self.add_relation(triple.relation, model.relation_row(triple.relation), scale);
        self.add_entity(triple.tail, model.entity_row(triple.tail), scale);
    }
}

fn squared_norm(row: &[f64]) -> f64 {
    row.iter().map(|v| v * v).sum()
}

/// Loss of one aligned positive/negative batch and its exact gradients.
///
/// TransE uses the margin ranking loss
/// `sum_i max(0, margin + score(neg_i) - score(pos_i))`; DistMult and ComplEx
/// use the logistic loss
/// `sum_i softplus(-score(pos_i)) + softplus(score(neg_i))` plus
/// `reg_lambda` times the squared norms of every row occurrence the batch
/// touches.
pub fn loss_and_grads(
    model: &EmbeddingModel,
    positives: &[Triple],
    negatives: &[Triple],
    cfg: &TrainConfig,
) -> Result<(f64, SparseGrads)> {
    if positives.len() != negatives.len() {
        return Err(Error::arg(format!(
            "positive and negative batches must be aligned ({} vs {})",
            positives.len(),
            negatives.len()
        )));
    }
    let mut grads = SparseGrads::default();
    let mut loss = 0.0;
    match model.kind() {
        ModelKind::TransE { .. } => {
            for (pos, neg) in positives.iter().zip(negatives) {
                let s_pos = model.score(pos)?;
                let s_neg = model.score(neg)?;
                let hinge = cfg.margin + s_neg - s_pos;
                if hinge > 0.0 {
                    loss += hinge;
                    let g_pos = model.grad(pos)?;
                    let g_neg = model.grad(neg)?;
                    // d loss / d theta = d s_neg - d s_pos
                    grads.add_entity(neg.head, &g_neg.head, 1.0);
                    grads.add_relation(neg.relation, &g_neg.relation, 1.0);
                    grads.add_entity(neg.tail, &g_neg.tail, 1.0);
                    grads.add_entity(pos.head, &g_pos.head, -1.0);
                    grads.add_relation(pos.relation, &g_pos.relation, -1.0);
                    grads.add_entity(pos.tail, &g_pos.tail, -1.0);
                }
            }
        }
        ModelKind::DistMult | ModelKind::ComplEx { .. } => {
            let lambda = cfg.reg_lambda;
            for (pos, neg) in positives.iter().zip(negatives) {
                let s_pos = model.score(pos)?;
                let s_neg = model.score(neg)?;
                loss += math::softplus(-s_pos) + math::softplus(s_neg);
                let w_pos = -math::sigmoid(-s_pos);
                let w_neg = math::sigmoid(s_neg);
                let g_pos = model.grad(pos)?;
                let g_neg = model.grad(neg)?;
                grads.add_entity(pos.head, &g_pos.head, w_pos);
                grads.add_relation(pos.relation, &g_pos.relation, w_pos);
                grads.add_entity(pos.tail, &g_pos.tail, w_pos);
                grads.add_entity(neg.head, &g_neg.head, w_neg);
                grads.add_relation(neg.relation, &g_neg.relation, w_neg);
                grads.add_entity(neg.tail, &g_neg.tail, w_neg);
                if lambda > 0.0 {
                    for t in [pos, neg] {
                        loss += lambda
                            * (squared_norm(model.entity_row(t.head))
                                + squared_norm(model.relation_row(t.relation))
                                + squared_norm(model.entity_row(t.tail)));
                        grads.add_row_penalty(model, t, 2.0 * lambda);
                    }
                }
            }
        }
    }
    Ok((loss, grads))
}

/// Apply one optimizer step for the accumulated batch gradients.
///
/// SGD: `row -= lr * g`. Adagrad: `accum += g .* g` followed by
/// `row -= lr * g / sqrt(accum + 1e-8)`. Rows without gradients are untouched.
pub fn apply_update(model: &mut EmbeddingModel, grads: &SparseGrads, cfg: &TrainConfig) {
    const ADAGRAD_EPS: f64 = 1e-8;
    let lr = cfg.learning_rate;
    match cfg.optimizer {
        Optimizer::Sgd => {
            for (&idx, g) in &grads.entity {
                for (p, gi) in model.entity_row_mut(idx).iter_mut().zip(g) {
                    *p -= lr * gi;
                }
            }
            for (&idx, g) in &grads.relation {
                for (p, gi) in model.relation_row_mut(idx).iter_mut().zip(g) {
                    *p -= lr * gi;
                }
            }
        }
        Optimizer::Adagrad => {
            for (&idx, g) in &grads.entity {
                let accum = model.entity_accum_mut(idx);
                for (a, gi) in accum.iter_mut().zip(g) {
                    *a += gi * gi;
                }
                let steps: Vec<f64> = model
                    .entity_accum_mut(idx)
                    .iter()
                    .zip(g)
                    .map(|(a, gi)| lr * gi / math::sqrt(*a + ADAGRAD_EPS))
                    .collect();
                for (p, s) in model.entity_row_mut(idx).iter_mut().zip(&steps) {
                    *p -= s;
                }
            }
            for (&idx, g) in &grads.relation {
                let accum = model.relation_accum_mut(idx);
                for (a, gi) in accum.iter_mut().zip(g) {
                    *a += gi * gi;
                }
                let steps: Vec<f64> = model
                    .relation_accum_mut(idx)
                    .iter()
                    .zip(g)
                    .map(|(a, gi)| lr * gi / math::sqrt(*a + ADAGRAD_EPS))
                    .collect();
                for (p, s) in model.relation_row_mut(idx).iter_mut().zip(&steps) {
                    *p -= s;
                }
            }
        }
    }
}

/// One full pass of a model over its positives in shuffled mini-batches.
/// Returns the summed loss across batches.
fn run_epoch(
    model: &mut EmbeddingModel,
    kg: &KnowledgeGraph,
    negatives: &NegativeSampleSet,
    shuffle_seed: u64,
    cfg: &TrainConfig,
) -> Result<f64> {
    let n = kg.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(shuffle_seed));
    let batch_size = n.div_ceil(cfg.n_batches);
    let mut epoch_loss = 0.0;
    for chunk in order.chunks(batch_size) {
        let pos_batch: Vec<Triple> = chunk.iter().map(|&i| kg.triples()[i]).collect();
        let neg_batch: Vec<Triple> = chunk.iter().map(|&i| negatives.samples[i]).collect();
        let (loss, grads) = loss_and_grads(model, &pos_batch, &neg_batch, cfg)?;
        apply_update(model, &grads, cfg);
        epoch_loss += loss;
    }
    Ok(epoch_loss)
}

fn ensure_finite(model: &EmbeddingModel, label: &str, epoch: usize) -> Result<()> {
    if !model.all_params_finite() {
        return Err(Error::Numeric(format!(
            "{label} parameters became non-finite after epoch {epoch}; lower the learning rate"
        )));
    }
    Ok(())
}

/// Sample sets generated at the start of an epoch, before either model steps.
pub struct EpochSamples<'a> {
    /// 1-based epoch number.
    pub epoch: usize,
    pub provenance: Provenance,
    pub pos_samples: &'a NegativeSampleSet,
    pub neg_samples: &'a NegativeSampleSet,
    /// Models as they stood when the samples were generated (pre-update).
    pub pos_model: &'a EmbeddingModel,
    pub neg_model: &'a EmbeddingModel,
}

/// Train the positive-graph and negative-graph models in lockstep.
pub fn train_dual(
    kg_pos: &KnowledgeGraph,
    kg_neg: &KnowledgeGraph,
    cfg: &TrainConfig,
) -> Result<DualModelState> {
    train_dual_with_hook(kg_pos, kg_neg, cfg, |_| {})
}

/// [`train_dual`] with an observer invoked once per epoch right after sample
/// generation and before either model updates. Intended for tests and
/// diagnostics that need to see the exact sampling snapshot.
pub fn train_dual_with_hook(
    kg_pos: &KnowledgeGraph,
    kg_neg: &KnowledgeGraph,
    cfg: &TrainConfig,
    mut hook: impl FnMut(&EpochSamples<'_>),
) -> Result<DualModelState> {
    cfg.validate()?;
    if !kg_pos.shares_vocab_with(kg_neg) {
        return Err(Error::arg("positive and negative graphs must share one vocabulary"));
    }
    if kg_pos.is_empty() || kg_neg.is_empty() {
        return Err(Error::arg("both graphs must be non-empty"));
    }
    let n_entities = kg_pos.vocab().n_entities();
    let n_relations = kg_pos.vocab().n_relations();
    let mut pos_model = init_model(
        cfg.kind,
        cfg.dim,
        n_entities,
        n_relations,
        derive_seed(cfg.seed, &[1, 0]),
    )?;
    let mut neg_model = init_model(
        cfg.kind,
        cfg.dim,
        n_entities,
        n_relations,
        derive_seed(cfg.seed, &[1, 1]),
    )?;
    let mut master: SeededRng = rng_from_seed(derive_seed(cfg.seed, &[2]));
    let mut loss_history = Vec::with_capacity(cfg.epochs);
    let mut current_pos_samples: Option<NegativeSampleSet> = None;
    let mut current_neg_samples: Option<NegativeSampleSet> = None;
    let mut contrastive_age = 0usize;

    for epoch in 1..=cfg.epochs {
        // One fixed block of sub-seeds per epoch, regardless of phase.
        let sample_seed_pos = master.gen::<u64>();
        let sample_seed_neg = master.gen::<u64>();
        let shuffle_seed_pos = master.gen::<u64>();
        let shuffle_seed_neg = master.gen::<u64>();

        if cfg.normalize_entities {
            if let ModelKind::TransE { .. } = cfg.kind {
                pos_model.project_entities_to_unit_ball();
                neg_model.project_entities_to_unit_ball();
            }
        }

        let contrastive = epoch > cfg.cl_phase;
        if contrastive {
            let regenerate = contrastive_age == 0 || current_pos_samples.is_none();
            if regenerate {
                current_pos_samples = Some(contrastive_corrupt(
                    kg_pos,
                    &neg_model,
                    &mut rng_from_seed(sample_seed_pos),
                    cfg.pool_size,
                )?);
                current_neg_samples = Some(contrastive_corrupt(
                    kg_neg,
                    &pos_model,
                    &mut rng_from_seed(sample_seed_neg),
                    cfg.pool_size,
                )?);
            }
            contrastive_age = (contrastive_age + 1) % cfg.contrastive_every;
        } else {
            current_pos_samples =
                Some(random_corrupt(kg_pos, &mut rng_from_seed(sample_seed_pos))?);
            current_neg_samples =
                Some(random_corrupt(kg_neg, &mut rng_from_seed(sample_seed_neg))?);
        }
        let pos_samples = current_pos_samples.as_ref().expect("samples generated above");
        let neg_samples = current_neg_samples.as_ref().expect("samples generated above");

        hook(&EpochSamples {
            epoch,
            provenance: pos_samples.provenance,
            pos_samples,
            neg_samples,
            pos_model: &pos_model,
            neg_model: &neg_model,
        });

        let loss_pos = run_epoch(&mut pos_model, kg_pos, pos_samples, shuffle_seed_pos, cfg)?;
        let loss_neg = run_epoch(&mut neg_model, kg_neg, neg_samples, shuffle_seed_neg, cfg)?;
        ensure_finite(&pos_model, "positive model", epoch)?;
        ensure_finite(&neg_model, "negative model", epoch)?;

        loss_history.push(EpochRecord {
            epoch,
            loss_pos,
            loss_neg,
            provenance: pos_samples.provenance,
        });
    }

    Ok(DualModelState {
        pos_model,
        neg_model,
        epoch: cfg.epochs,
        rng: master,
        loss_history,
    })
}

/// Train a single model on one graph with random negatives throughout, at
/// twice the configured dimension.
///
/// This is the comparison baseline: doubling the dimension makes the final
/// embedding width equal to the dual models' concatenation.
pub fn train_baseline(kg: &KnowledgeGraph, cfg: &TrainConfig) -> Result<BaselineState> {
    cfg.validate()?;
    if kg.is_empty() {
        return Err(Error::arg("graph must be non-empty"));
    }
    let mut model = init_model(
        cfg.kind,
        2 * cfg.dim,
        kg.vocab().n_entities(),
        kg.vocab().n_relations(),
        derive_seed(cfg.seed, &[1, 0]),
    )?;
    let mut master: SeededRng = rng_from_seed(derive_seed(cfg.seed, &[2]));
    let mut loss_history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let sample_seed = master.gen::<u64>();
        let shuffle_seed = master.gen::<u64>();
        if cfg.normalize_entities {
            if let ModelKind::TransE { .. } = cfg.kind {
                model.project_entities_to_unit_ball();
            }
        }
        let samples = random_corrupt(kg, &mut rng_from_seed(sample_seed))?;
        let loss = run_epoch(&mut model, kg, &samples, shuffle_seed, cfg)?;
        ensure_finite(&model, "baseline model", epoch)?;
        loss_history.push(loss);
    }
    Ok(BaselineState { model, epoch: cfg.epochs, rng: master, loss_history })
}

/// Standalone concatenation helper mirroring
/// [`DualModelState::final_representation`].
pub fn final_representation(state: &DualModelState, entity: usize) -> Result<Vec<f64>> {
    state.final_representation(entity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Vocabulary;
    use alloc::sync::Arc;

    fn toy_pair() -> (KnowledgeGraph, KnowledgeGraph) {
        let mut v = Vocabulary::new();
        for i in 0..6 {
            v.intern_entity(&format!("e{i}"));
        }
        v.intern_relation("r0");
        v.intern_relation("r1");
        let vocab = Arc::new(v);
        let pos = KnowledgeGraph::new(
            vocab.clone(),
            vec![
                Triple::new(0, 0, 1),
                Triple::new(1, 0, 2),
                Triple::new(2, 1, 3),
                Triple::new(3, 1, 4),
                Triple::new(4, 0, 5),
            ],
        )
        .unwrap();
        let neg = KnowledgeGraph::new(
            vocab,
            vec![Triple::new(0, 0, 3), Triple::new(2, 1, 5), Triple::new(4, 0, 1)],
        )
        .unwrap();
        (pos, neg)
    }

    fn quick_cfg(kind: ModelKind) -> TrainConfig {
        let mut cfg = TrainConfig::defaults_for(kind);
        cfg.dim = 4;
        cfg.epochs = 6;
        cfg.n_batches = 2;
        cfg.cl_phase = 3;
        cfg.seed = 7;
        cfg
    }

    #[test]
    fn config_validation_catches_bad_values() {
        let mut cfg = TrainConfig::defaults_for(ModelKind::DistMult);
        cfg.n_batches = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = TrainConfig::defaults_for(ModelKind::DistMult);
        cfg.neg_rate = 2;
        assert!(cfg.validate().is_err());
        let mut cfg = TrainConfig::defaults_for(ModelKind::DistMult);
        cfg.learning_rate = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn transe_hinge_hand_example() {
        // margin 1, score(pos) = 0, score(neg) = -2 -> max(0, 1 - 2 - 0) = 0
        let mut cfg = TrainConfig::defaults_for(ModelKind::TransE { norm: 1 });
        cfg.dim = 2;
        let mut model = init_model(cfg.kind, 2, 3, 1, 0).unwrap();
        model.entity_row_mut(0).copy_from_slice(&[1.0, 0.0]);
        model.entity_row_mut(1).copy_from_slice(&[1.5, 0.0]);
        model.entity_row_mut(2).copy_from_slice(&[3.5, 0.0]);
        model.relation_row_mut(0).copy_from_slice(&[0.5, 0.0]);
        let pos = [Triple::new(0, 0, 1)];
        let neg = [Triple::new(0, 0, 2)];
        assert_eq!(model.score(&pos[0]).unwrap(), 0.0);
        assert_eq!(model.score(&neg[0]).unwrap(), -2.0);
        let (loss, grads) = loss_and_grads(&model, &pos, &neg, &cfg).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.entity.is_empty());
        assert!(grads.relation.is_empty());
    }

    #[test]
    fn distmult_zero_params_loss_is_two_ln_two_per_pair() {
        let mut cfg = TrainConfig::defaults_for(ModelKind::DistMult);
        cfg.dim = 3;
        cfg.reg_lambda = 0.0;
        let mut model = init_model(cfg.kind, 3, 3, 1, 0).unwrap();
        for e in 0..3 {
            model.entity_row_mut(e).fill(0.0);
        }
        model.relation_row_mut(0).fill(0.0);
        let pos = [Triple::new(0, 0, 1), Triple::new(1, 0, 2)];
        let neg = [Triple::new(0, 0, 2), Triple::new(1, 0, 0)];
        let (loss, _) = loss_and_grads(&model, &pos, &neg, &cfg).unwrap();
        let expected = 2.0 * 2.0 * core::f64::consts::LN_2;
        assert!((loss - expected).abs() < 1e-12);
    }

    #[test]
    fn loss_rejects_misaligned_batches() {
        let cfg = TrainConfig::defaults_for(ModelKind::DistMult);
        let model = init_model(cfg.kind, 2, 3, 1, 0).unwrap();
        let pos = [Triple::new(0, 0, 1)];
        let neg: [Triple; 0] = [];
        assert!(loss_and_grads(&model, &pos, &neg, &cfg).is_err());
    }

    #[test]
    fn loss_gradients_match_finite_differences() {
        for kind in [
            ModelKind::TransE { norm: 1 },
            ModelKind::TransE { norm: 2 },
            ModelKind::DistMult,
            ModelKind::ComplEx { conjugate: true },
        ] {
            let mut cfg = TrainConfig::defaults_for(kind);
            cfg.dim = 3;
            cfg.margin = 1.0;
            cfg.reg_lambda = 1e-3;
            let model = init_model(kind, 3, 4, 2, 42).unwrap();
            let pos = [Triple::new(0, 0, 1), Triple::new(2, 1, 3)];
            let neg = [Triple::new(0, 0, 3), Triple::new(1, 1, 3)];
            let (_, grads) = loss_and_grads(&model, &pos, &neg, &cfg).unwrap();

            let eps = 1e-6;
            for (&idx, g) in &grads.entity {
                for (i, &gi) in g.iter().enumerate() {
                    let mut probe = model.clone();
                    probe.entity_row_mut(idx)[i] += eps;
                    let (lp, _) = loss_and_grads(&probe, &pos, &neg, &cfg).unwrap();
                    probe.entity_row_mut(idx)[i] -= 2.0 * eps;
                    let (lm, _) = loss_and_grads(&probe, &pos, &neg, &cfg).unwrap();
                    let fd = (lp - lm) / (2.0 * eps);
                    assert!(
                        (fd - gi).abs() / fd.abs().max(gi.abs()).max(1.0) < 1e-4,
                        "kind {kind:?} entity {idx}[{i}]: fd {fd} vs analytic {gi}"
                    );
                }
            }
        }
    }

    #[test]
    fn sgd_update_hand_example() {
        let mut cfg = TrainConfig::defaults_for(ModelKind::TransE { norm: 1 });
        cfg.learning_rate = 0.1;
        cfg.optimizer = Optimizer::Sgd;
        let mut model = init_model(cfg.kind, 2, 2, 1, 0).unwrap();
        model.entity_row_mut(0).copy_from_slice(&[1.0, 1.0]);
        let mut grads = SparseGrads::default();
        grads.add_entity(0, &[1.0, 0.0], 1.0);
        apply_update(&mut model, &grads, &cfg);
        assert_eq!(model.entity_row(0), &[0.9, 1.0]);
    }

    #[test]
    fn adagrad_update_hand_example() {
        let mut cfg = TrainConfig::defaults_for(ModelKind::DistMult);
        cfg.learning_rate = 0.1;
        cfg.optimizer = Optimizer::Adagrad;
        let mut model = init_model(cfg.kind, 1, 2, 1, 0).unwrap();
        model.entity_row_mut(0).copy_from_slice(&[1.0]);
        let mut grads = SparseGrads::default();
        grads.add_entity(0, &[2.0], 1.0);
        apply_update(&mut model, &grads, &cfg);
        assert_eq!(model.entity_accum().unwrap().row(0), &[4.0]);
        let delta = model.entity_row(0)[0] - 1.0;
        assert!((delta + 0.1 * 2.0 / (4.0f64 + 1e-8).sqrt()).abs() < 1e-15);
        assert!((delta + 0.1).abs() < 1e-8);
    }

    #[test]
    fn zero_gradient_leaves_model_unchanged() {
        let cfg = TrainConfig::defaults_for(ModelKind::DistMult);
        let mut model = init_model(cfg.kind, 3, 4, 2, 5).unwrap();
        let before = model.clone();
        apply_update(&mut model, &SparseGrads::default(), &cfg);
        assert_eq!(model.entity_params(), before.entity_params());
        assert_eq!(model.relation_params(), before.relation_params());
    }

    #[test]
    fn adagrad_accumulators_never_decrease() {
        let (pos, neg) = toy_pair();
        let mut cfg = quick_cfg(ModelKind::DistMult);
        cfg.epochs = 4;
        let mut prev: Option<Vec<f64>> = None;
        // retrain with increasing epochs and compare accumulators
        for epochs in 1..=4 {
            cfg.epochs = epochs;
            cfg.cl_phase = 2;
            let state = train_dual(&pos, &neg, &cfg).unwrap();
            let accum = state.pos_model.entity_accum().unwrap().data().to_vec();
            if let Some(p) = prev {
                for (now, before) in accum.iter().zip(&p) {
                    assert!(now >= before);
                }
            }
            assert!(accum.iter().all(|&a| a >= 0.0));
            prev = Some(accum);
        }
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let (pos, neg) = toy_pair();
        let mut cfg = quick_cfg(ModelKind::TransE { norm: 1 });
        cfg.epochs = 0;
        cfg.cl_phase = 0;
        let state = train_dual(&pos, &neg, &cfg).unwrap();
        assert!(state.loss_history.is_empty());
        let fresh = init_model(cfg.kind, cfg.dim, 6, 2, derive_seed(cfg.seed, &[1, 0])).unwrap();
        assert_eq!(state.pos_model.entity_params(), fresh.entity_params());
    }

    #[test]
    fn provenance_switches_exactly_after_cl_phase() {
        let (pos, neg) = toy_pair();
        let cfg = quick_cfg(ModelKind::TransE { norm: 1 });
        let state = train_dual(&pos, &neg, &cfg).unwrap();
        for rec in &state.loss_history {
            let expected = if rec.epoch > cfg.cl_phase {
                Provenance::Contrastive
            } else {
                Provenance::Random
            };
            assert_eq!(rec.provenance, expected, "epoch {}", rec.epoch);
        }
    }

    #[test]
    fn cl_phase_at_or_past_epochs_stays_random() {
        let (pos, neg) = toy_pair();
        let mut cfg = quick_cfg(ModelKind::DistMult);
        cfg.cl_phase = cfg.epochs;
        let state = train_dual(&pos, &neg, &cfg).unwrap();
        assert!(state.loss_history.iter().all(|r| r.provenance == Provenance::Random));
    }

    #[test]
    fn training_is_bitwise_deterministic() {
        let (pos, neg) = toy_pair();
        for kind in [ModelKind::TransE { norm: 1 }, ModelKind::DistMult] {
            let cfg = quick_cfg(kind);
            let a = train_dual(&pos, &neg, &cfg).unwrap();
            let b = train_dual(&pos, &neg, &cfg).unwrap();
            assert_eq!(a.pos_model.entity_params().data(), b.pos_model.entity_params().data());
            assert_eq!(a.neg_model.entity_params().data(), b.neg_model.entity_params().data());
            assert_eq!(a.loss_history, b.loss_history);
        }
    }

    #[test]
    fn first_epoch_contrastive_samples_match_sampler_oracle() {
        // With cl_phase = 0 the very first epoch is contrastive and must agree
        // with calling the sampler directly against the initial models.
        let (pos, neg) = toy_pair();
        let mut cfg = quick_cfg(ModelKind::DistMult);
        cfg.cl_phase = 0;
        cfg.epochs = 1;
        let mut seen = false;
        let state = train_dual_with_hook(&pos, &neg, &cfg, |ev| {
            assert_eq!(ev.provenance, Provenance::Contrastive);
            // every sample must be the exhaustive argmax under the opposing model
            for (p, n) in pos.triples().iter().zip(&ev.pos_samples.samples) {
                let slot = if p.head != n.head {
                    crate::graph::Slot::Head
                } else {
                    crate::graph::Slot::Tail
                };
                let orig = p.slot_entity(slot);
                let chosen = ev.neg_model.score(n).unwrap();
                for c in pos.unique_entities().iter().copied().filter(|&c| c != orig) {
                    let s = ev.neg_model.score(&p.with_slot(slot, c)).unwrap();
                    assert!(chosen >= s);
                }
            }
            seen = true;
        })
        .unwrap();
        assert!(seen);
        assert_eq!(state.epoch, 1);
    }

    #[test]
    fn final_representation_concatenates() {
        let (pos, neg) = toy_pair();
        let mut cfg = quick_cfg(ModelKind::TransE { norm: 1 });
        cfg.epochs = 0;
        cfg.cl_phase = 0;
        let state = train_dual(&pos, &neg, &cfg).unwrap();
        let rep = state.final_representation(2).unwrap();
        assert_eq!(rep.len(), 2 * cfg.dim);
        assert_eq!(&rep[..cfg.dim], state.pos_model.entity_row(2));
        assert_eq!(&rep[cfg.dim..], state.neg_model.entity_row(2));
        assert!(state.final_representation(99).is_err());
    }

    #[test]
    fn complex_final_representation_width() {
        let (pos, neg) = toy_pair();
        let mut cfg = quick_cfg(ModelKind::ComplEx { conjugate: true });
        cfg.epochs = 0;
        cfg.cl_phase = 0;
        let state = train_dual(&pos, &neg, &cfg).unwrap();
        assert_eq!(state.final_representation(0).unwrap().len(), 4 * cfg.dim);
    }

    #[test]
    fn baseline_doubles_dimension() {
        let (pos, _) = toy_pair();
        let mut cfg = quick_cfg(ModelKind::TransE { norm: 1 });
        cfg.epochs = 0;
        let state = train_baseline(&pos, &cfg).unwrap();
        assert_eq!(state.model.width(), 2 * cfg.dim);
        assert!(state.loss_history.is_empty());

        let mut cfg = quick_cfg(ModelKind::ComplEx { conjugate: true });
        cfg.epochs = 0;
        let state = train_baseline(&pos, &cfg).unwrap();
        assert_eq!(state.model.width(), 4 * cfg.dim);
    }

    #[test]
    fn baseline_is_deterministic() {
        let (pos, _) = toy_pair();
        let cfg = quick_cfg(ModelKind::DistMult);
        let a = train_baseline(&pos, &cfg).unwrap();
        let b = train_baseline(&pos, &cfg).unwrap();
        assert_eq!(a.model.entity_params().data(), b.model.entity_params().data());
        assert_eq!(a.loss_history, b.loss_history);
    }

    #[test]
    fn contrastive_every_reuses_samples_between_regenerations() {
        let (pos, neg) = toy_pair();
        let mut cfg = quick_cfg(ModelKind::DistMult);
        cfg.cl_phase = 0;
        cfg.epochs = 4;
        cfg.contrastive_every = 2;
        let mut sample_log: Vec<Vec<Triple>> = Vec::new();
        train_dual_with_hook(&pos, &neg, &cfg, |ev| {
            sample_log.push(ev.pos_samples.samples.clone());
        })
        .unwrap();
        assert_eq!(sample_log.len(), 4);
        assert_eq!(sample_log[0], sample_log[1]);
        assert_eq!(sample_log[2], sample_log[3]);
    }

    #[test]
    fn parameters_stay_finite_on_toy_graphs() {
        let (pos, neg) = toy_pair();
        for kind in [
            ModelKind::TransE { norm: 1 },
            ModelKind::DistMult,
            ModelKind::ComplEx { conjugate: true },
        ] {
            let mut cfg = quick_cfg(kind);
            cfg.epochs = 30;
            cfg.cl_phase = 20;
            let state = train_dual(&pos, &neg, &cfg).unwrap();
            assert!(state.pos_model.all_params_finite());
            assert!(state.neg_model.all_params_finite());
        }
    }
}
