//! JSON report envelopes for the evaluation tasks.
//!
//! Every report carries `schema_version` (currently 1) and a `task` tag.
//! Metric payloads mirror the core report types field by field.

use serde::Serialize;

use dualkge_core::classify::ClassificationReport;
use dualkge_core::cluster::ClusteringMetrics;
use dualkge_core::eval::{RankingReport, SemReport};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct LpReportJson {
    pub schema_version: u32,
    pub task: &'static str,
    pub repr: String,
    #[serde(flatten)]
    pub metrics: RankingReport,
}

impl LpReportJson {
    pub fn new(repr: &str, metrics: RankingReport) -> Self {
        LpReportJson {
            schema_version: REPORT_SCHEMA_VERSION,
            task: "lp",
            repr: repr.to_string(),
            metrics,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SemReportJson {
    pub schema_version: u32,
    pub task: &'static str,
    pub repr: String,
    /// Type-map lines skipped because their entity is not in the vocabulary.
    pub type_map_skipped: usize,
    #[serde(flatten)]
    pub metrics: SemReport,
}

impl SemReportJson {
    pub fn new(repr: &str, type_map_skipped: usize, metrics: SemReport) -> Self {
        SemReportJson {
            schema_version: REPORT_SCHEMA_VERSION,
            task: "sem",
            repr: repr.to_string(),
            type_map_skipped,
            metrics,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TcReportJson {
    pub schema_version: u32,
    pub task: &'static str,
    pub repr: String,
    pub n_pairs: usize,
    #[serde(flatten)]
    pub metrics: ClassificationReport,
}

impl TcReportJson {
    pub fn new(repr: &str, n_pairs: usize, metrics: ClassificationReport) -> Self {
        TcReportJson {
            schema_version: REPORT_SCHEMA_VERSION,
            task: "tc",
            repr: repr.to_string(),
            n_pairs,
            metrics,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClusterReportJson {
    pub schema_version: u32,
    pub task: &'static str,
    pub repr: String,
    pub n_points: usize,
    pub n_types: usize,
    pub type_map_skipped: usize,
    #[serde(flatten)]
    pub metrics: ClusteringMetrics,
}

impl ClusterReportJson {
    pub fn new(
        repr: &str,
        n_points: usize,
        n_types: usize,
        type_map_skipped: usize,
        metrics: ClusteringMetrics,
    ) -> Self {
        ClusterReportJson {
            schema_version: REPORT_SCHEMA_VERSION,
            task: "cluster",
            repr: repr.to_string(),
            n_points,
            n_types,
            type_map_skipped,
            metrics,
        }
    }
}
