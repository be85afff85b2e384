//! Embedding models: parameter storage, scoring, and analytic score gradients.
//!
//! Three model families are supported. With `d`-dimensional embeddings the
//! stored row width is `d` for TransE and DistMult and `2d` for ComplEx
//! (real half followed by imaginary half).
//!
//! Scores are "higher is more plausible":
//!
//! - TransE: `-|h + r - t|_p` for p in {1, 2}
//! - DistMult: `sum_i h_i * r_i * t_i`
//! - ComplEx: `Re(sum_i h_i * r_i * conj(t_i))`, or the variant without tail
//!   conjugation when configured.
//!
//! Every scoring path funnels through one shared kernel over three row
//! slices, so batched corruption scoring is bitwise identical to scoring
//! triples one at a time.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Slot, Triple};
use crate::math;
use crate::rng::rng_from_seed;

/// Which scoring family a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelKind {
    /// Translational scoring with the given norm order (1 or 2).
    TransE { norm: u8 },
    /// Diagonal bilinear scoring.
    DistMult,
    /// Complex-valued bilinear scoring. `conjugate` selects whether the tail
    /// embedding is conjugated (the original formulation) or not.
    ComplEx { conjugate: bool },
}

impl ModelKind {
    /// Storage width of one parameter row for embedding dimension `dim`.
    pub fn row_width(&self, dim: usize) -> usize {
        match self {
            ModelKind::ComplEx { .. } => 2 * dim,
            _ => dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ModelKind::TransE { norm } = self {
            if *norm != 1 && *norm != 2 {
                return Err(Error::arg(format!("TransE norm order must be 1 or 2, got {norm}")));
            }
        }
        Ok(())
    }

    /// Stable textual name, used in export headers and config echoes.
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::TransE { norm: 1 } => "transe_l1",
            ModelKind::TransE { .. } => "transe_l2",
            ModelKind::DistMult => "distmult",
            ModelKind::ComplEx { conjugate: true } => "complex",
            ModelKind::ComplEx { conjugate: false } => "complex_noconj",
        }
    }

    /// Inverse of [`ModelKind::name`].
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "transe_l1" => Ok(ModelKind::TransE { norm: 1 }),
            "transe_l2" => Ok(ModelKind::TransE { norm: 2 }),
            "distmult" => Ok(ModelKind::DistMult),
            "complex" => Ok(ModelKind::ComplEx { conjugate: true }),
            "complex_noconj" => Ok(ModelKind::ComplEx { conjugate: false }),
            other => Err(Error::arg(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Dense row-major matrix of 64-bit parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Entity and relation embeddings for one scoring model, plus Adagrad
/// accumulators when that optimizer is in use.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingModel {
    kind: ModelKind,
    dim: usize,
    entity_params: Matrix,
    relation_params: Matrix,
    entity_accum: Option<Matrix>,
    relation_accum: Option<Matrix>,
}

/// Sparse gradient of a single triple's score: one row each for the head
/// entity, the relation, and the tail entity. Rows for all other parameters
/// are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreGrad {
    pub head: Vec<f64>,
    pub relation: Vec<f64>,
    pub tail: Vec<f64>,
}

/// Initialize a model with Xavier-uniform parameters.
///
/// Each matrix is sampled i.i.d. uniform on `[-b, b)` with
/// `b = sqrt(6 / (rows + width))`; entity values are drawn before relation
/// values from a ChaCha stream seeded by `seed`, so initialization is
/// bit-reproducible.
pub fn init_model(
    kind: ModelKind,
    dim: usize,
    n_entities: usize,
    n_relations: usize,
    seed: u64,
) -> Result<EmbeddingModel> {
    kind.validate()?;
    if dim == 0 {
        return Err(Error::arg("embedding dimension must be at least 1"));
    }
    if n_entities == 0 || n_relations == 0 {
        return Err(Error::arg("entity and relation counts must be at least 1"));
    }
    let width = kind.row_width(dim);
    let mut rng = rng_from_seed(seed);
    let mut sample_matrix = |rows: usize| {
        let bound = math::sqrt(6.0 / (rows + width) as f64);
        let mut m = Matrix::zeros(rows, width);
        for v in m.data.iter_mut() {
            let u: f64 = rng.gen();
            *v = bound * (2.0 * u - 1.0);
        }
        m
    };
    let entity_params = sample_matrix(n_entities);
    let relation_params = sample_matrix(n_relations);
    Ok(EmbeddingModel {
        kind,
        dim,
        entity_params,
        relation_params,
        entity_accum: None,
        relation_accum: None,
    })
}

impl EmbeddingModel {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Embedding dimension `d` (storage width is `2d` for ComplEx).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Width of one stored parameter row.
    pub fn width(&self) -> usize {
        self.entity_params.cols()
    }

    pub fn n_entities(&self) -> usize {
        self.entity_params.rows()
    }

    pub fn n_relations(&self) -> usize {
        self.relation_params.rows()
    }

    pub fn entity_row(&self, e: usize) -> &[f64] {
        self.entity_params.row(e)
    }

    pub fn relation_row(&self, r: usize) -> &[f64] {
        self.relation_params.row(r)
    }

    pub fn entity_params(&self) -> &Matrix {
        &self.entity_params
    }

    pub fn relation_params(&self) -> &Matrix {
        &self.relation_params
    }

    /// Mutable view of one entity row, e.g. for seeding pretrained vectors.
    pub fn entity_row_mut(&mut self, e: usize) -> &mut [f64] {
        self.entity_params.row_mut(e)
    }

    /// Mutable view of one relation row.
    pub fn relation_row_mut(&mut self, r: usize) -> &mut [f64] {
        self.relation_params.row_mut(r)
    }

    /// Adagrad accumulator row for an entity, allocating lazily.
    pub(crate) fn entity_accum_mut(&mut self, e: usize) -> &mut [f64] {
        let (rows, cols) = (self.entity_params.rows(), self.entity_params.cols());
        self.entity_accum
            .get_or_insert_with(|| Matrix::zeros(rows, cols))
            .row_mut(e)
    }

    pub(crate) fn relation_accum_mut(&mut self, r: usize) -> &mut [f64] {
        let (rows, cols) = (self.relation_params.rows(), self.relation_params.cols());
        self.relation_accum
            .get_or_insert_with(|| Matrix::zeros(rows, cols))
            .row_mut(r)
    }

    pub fn entity_accum(&self) -> Option<&Matrix> {
        self.entity_accum.as_ref()
    }

    pub fn relation_accum(&self) -> Option<&Matrix> {
        self.relation_accum.as_ref()
    }

    pub fn all_params_finite(&self) -> bool {
        self.entity_params.is_finite() && self.relation_params.is_finite()
    }

    fn check_triple(&self, triple: &Triple) -> Result<()> {
        if triple.head >= self.n_entities() || triple.tail >= self.n_entities() {
            return Err(Error::arg(format!(
                "entity index out of range: ({}, {}, {}) vs {} entities",
                triple.head,
                triple.relation,
                triple.tail,
                self.n_entities()
            )));
        }
        if triple.relation >= self.n_relations() {
            return Err(Error::arg(format!(
                "relation index {} out of range ({} relations)",
                triple.relation,
                self.n_relations()
            )));
        }
        Ok(())
    }

    /// Plausibility score of a triple; higher means more plausible.
    pub fn score(&self, triple: &Triple) -> Result<f64> {
        self.check_triple(triple)?;
        Ok(self.score_unchecked(triple))
    }

    #[inline]
    pub(crate) fn score_unchecked(&self, triple: &Triple) -> f64 {
        score_rows(
            self.kind,
            self.entity_params.row(triple.head),
            self.relation_params.row(triple.relation),
            self.entity_params.row(triple.tail),
        )
    }

    /// Scoring closure over triples with in-range indices; suitable for the
    /// evaluation APIs. Panics on out-of-range indices, like slice indexing.
    pub fn scorer(&self) -> impl Fn(&Triple) -> f64 + Sync + '_ {
        move |t| self.score_unchecked(t)
    }

    /// Scores of the triple with `slot` replaced by each candidate entity.
    ///
    /// Entry `j` equals `score` of the corrupted triple built from
    /// `candidates[j]`; the same kernel is used, so the values match
    /// one-at-a-time scoring exactly.
    pub fn score_all_corruptions(
        &self,
        triple: &Triple,
        slot: Slot,
        candidates: &[usize],
    ) -> Result<Vec<f64>> {
        self.check_triple(triple)?;
        if candidates.is_empty() {
            return Err(Error::arg("candidate list must be non-empty"));
        }
        let n_e = self.n_entities();
        if let Some(&bad) = candidates.iter().find(|&&c| c >= n_e) {
            return Err(Error::arg(format!("candidate entity {bad} out of range")));
        }
        let rel = self.relation_params.row(triple.relation);
        let scores = match slot {
            Slot::Head => {
                let tail = self.entity_params.row(triple.tail);
                candidates
                    .iter()
                    .map(|&c| score_rows(self.kind, self.entity_params.row(c), rel, tail))
                    .collect()
            }
            Slot::Tail => {
                let head = self.entity_params.row(triple.head);
                candidates
                    .iter()
                    .map(|&c| score_rows(self.kind, head, rel, self.entity_params.row(c)))
                    .collect()
            }
        };
        Ok(scores)
    }

    /// Analytic gradient of `score` with respect to the three involved rows.
    pub fn grad(&self, triple: &Triple) -> Result<ScoreGrad> {
        self.check_triple(triple)?;
        Ok(grad_rows(
            self.kind,
            self.entity_params.row(triple.head),
            self.relation_params.row(triple.relation),
            self.entity_params.row(triple.tail),
        ))
    }

    /// Project entity rows with L2 norm above one back onto the unit ball.
    pub(crate) fn project_entities_to_unit_ball(&mut self) {
        let cols = self.entity_params.cols();
        for i in 0..self.entity_params.rows() {
            let row = &mut self.entity_params.data[i * cols..(i + 1) * cols];
            let norm = math::sqrt(row.iter().map(|v| v * v).sum());
            if norm > 1.0 {
                for v in row.iter_mut() {
                    *v /= norm;
                }
            }
        }
    }

    /// Human-readable summary, handy in error messages.
    pub fn describe(&self) -> String {
        format!(
            "{} model, dim {}, {} entities x {} relations",
            self.kind.name(),
            self.dim,
            self.n_entities(),
            self.n_relations()
        )
    }
}

/// The single scoring kernel all paths share.
#[inline]
pub(crate) fn score_rows(kind: ModelKind, h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    match kind {
        ModelKind::TransE { norm } => {
            let mut acc = 0.0;
            if norm == 1 {
                for i in 0..h.len() {
                    acc += math::abs(h[i] + r[i] - t[i]);
                }
                -acc
            } else {
                for i in 0..h.len() {
                    let d = h[i] + r[i] - t[i];
                    acc += d * d;
                }
                -math::sqrt(acc)
            }
        }
        ModelKind::DistMult => {
            let mut acc = 0.0;
            for i in 0..h.len() {
                acc += h[i] * r[i] * t[i];
            }
            acc
        }
        ModelKind::ComplEx { conjugate } => {
            let d = h.len() / 2;
            let (hr, hi) = h.split_at(d);
            let (rr, ri) = r.split_at(d);
            let (tr, ti) = t.split_at(d);
            let mut acc = 0.0;
            if conjugate {
                // Re(h * r * conj(t))
                for i in 0..d {
                    acc += hr[i] * rr[i] * tr[i] - hi[i] * ri[i] * tr[i]
                        + hr[i] * ri[i] * ti[i]
                        + hi[i] * rr[i] * ti[i];
                }
            } else {
                // Re(h * r * t)
                for i in 0..d {
                    acc += hr[i] * rr[i] * tr[i]
                        - hi[i] * ri[i] * tr[i]
                        - hr[i] * ri[i] * ti[i]
                        - hi[i] * rr[i] * ti[i];
                }
            }
            acc
        }
    }
}

/// Analytic gradient of [`score_rows`] with respect to each input row.
pub(crate) fn grad_rows(kind: ModelKind, h: &[f64], r: &[f64], t: &[f64]) -> ScoreGrad {
    let w = h.len();
    let mut gh = vec![0.0; w];
    let mut gr = vec![0.0; w];
    let mut gt = vec![0.0; w];
    match kind {
        ModelKind::TransE { norm: 1 } => {
            for i in 0..w {
                let d = h[i] + r[i] - t[i];
                // subgradient 0 where the component is exactly zero
                let s = if d > 0.0 {
                    1.0
                } else if d < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                gh[i] = -s;
                gr[i] = -s;
                gt[i] = s;
            }
        }
        ModelKind::TransE { .. } => {
            let mut sq = 0.0;
            for i in 0..w {
                let d = h[i] + r[i] - t[i];
                sq += d * d;
            }
            let norm = math::sqrt(sq);
            if norm > 0.0 {
                for i in 0..w {
                    let d = h[i] + r[i] - t[i];
                    gh[i] = -d / norm;
                    gr[i] = -d / norm;
                    gt[i] = d / norm;
                }
            }
        }
        ModelKind::DistMult => {
            for i in 0..w {
                gh[i] = r[i] * t[i];
                gr[i] = h[i] * t[i];
                gt[i] = h[i] * r[i];
            }
        }
        ModelKind::ComplEx { conjugate } => {
            let d = w / 2;
            let (hr, hi) = h.split_at(d);
            let (rr, ri) = r.split_at(d);
            let (tr, ti) = t.split_at(d);
            if conjugate {
                for i in 0..d {
                    gh[i] = rr[i] * tr[i] + ri[i] * ti[i];
                    gh[d + i] = -ri[i] * tr[i] + rr[i] * ti[i];
                    gr[i] = hr[i] * tr[i] + hi[i] * ti[i];
                    gr[d + i] = -hi[i] * tr[i] + hr[i] * ti[i];
                    gt[i] = hr[i] * rr[i] - hi[i] * ri[i];
                    gt[d + i] = hr[i] * ri[i] + hi[i] * rr[i];
                }
            } else {
                for i in 0..d {
                    gh[i] = rr[i] * tr[i] - ri[i] * ti[i];
                    gh[d + i] = -ri[i] * tr[i] - rr[i] * ti[i];
                    gr[i] = hr[i] * tr[i] - hi[i] * ti[i];
                    gr[d + i] = -hi[i] * tr[i] - hr[i] * ti[i];
                    gt[i] = hr[i] * rr[i] - hi[i] * ri[i];
                    gt[d + i] = -hr[i] * ri[i] - hi[i] * rr[i];
                }
            }
        }
    }
    ScoreGrad { head: gh, relation: gr, tail: gt }
}
