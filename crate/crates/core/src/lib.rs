//! Dual-model knowledge graph embeddings with contrastive negative sampling.
//!
//! Two embedding models are trained in lockstep: one on a knowledge graph of
//! positive statements, the other on a graph of explicitly declared negative
//! statements. During a warm-up phase both models draw uniformly corrupted
//! negatives; after a configurable epoch threshold each model instead mines
//! hard negatives by scoring candidate corruptions with the *opposing* model
//! and keeping the highest-scoring one. The final entity representation is the
//! concatenation of both models' embedding rows.
//!
//! The crate is split along the training pipeline:
//!
//! - [`graph`]: vocabularies, triples, knowledge graphs, train/test splitting
//! - [`model`]: TransE / DistMult / ComplEx parameters, scoring, gradients
//! - [`sampling`]: random and cross-model contrastive corruption
//! - [`trainer`]: the lockstep dual training loop and the single-model baseline
//! - [`eval`]: filtered link-prediction ranking and type-aware top-K metrics
//! - [`forest`], [`classify`], [`stats`], [`cluster`]: downstream entity-pair
//!   classification and embedding-quality diagnostics
//!
//! Everything is seeded: identical inputs and seeds give bitwise-identical
//! parameters and metrics, independent of thread count. The crate is
//! `no_std`-compatible (with `alloc`) when built without the `std` feature;
//! file formats and the command-line surface live in the companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod classify;
pub mod cluster;
pub mod error;
pub mod eval;
pub mod forest;
pub mod graph;
pub mod model;
pub mod sampling;
pub mod stats;
pub mod trainer;

mod math;
mod parallel;
pub mod rng;

// Re-exported because hash sets of triples appear in the public API.
pub use hashbrown;

pub use error::{Error, Result};
pub use graph::{KnowledgeGraph, Triple, TypeMap, Vocabulary};
pub use model::{EmbeddingModel, ModelKind};
pub use sampling::{NegativeSampleSet, PoolSize, Provenance};
pub use trainer::{DualModelState, Optimizer, TrainConfig};
