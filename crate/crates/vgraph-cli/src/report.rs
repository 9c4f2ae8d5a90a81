//! Report schema.  Everything here serializes deterministically: struct
//! field order is fixed, undefined quantities are explicit `Option`s, and
//! no timestamps enter the report body.

use serde::Serialize;

use vgraph::dfa::Persistence;
use vgraph::distfit::{AlphaHurstBand, DegreeTailFit};
use vgraph::metrics::{GlobalStats, NullModelComparison};
use vgraph::LinearFit;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: ToolInfo,
    pub config: ConfigEcho,
    pub series: Vec<SeriesBlock>,
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

/// Echo of everything needed to reproduce the run bit-identically.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub input: String,
    pub columns: Vec<String>,
    pub has_header: bool,
    pub algo: &'static str,
    pub seed: u64,
    pub replicas: usize,
    pub realizations: usize,
    pub bins_per_decade: usize,
    pub lengths: Vec<usize>,
    pub family: String,
    pub k_min: String,
    pub log_fit_degree_cap: usize,
}

#[derive(Debug, Serialize)]
pub struct SeriesBlock {
    pub label: String,
    pub length: usize,
    pub hurst: HurstBlock,
    pub global: GlobalStats,
    pub clustering: ClusteringBlock,
    pub tail_fits: Vec<DegreeTailFit>,
    pub alpha_hurst: Vec<AlphaHurstBand>,
    pub small_world: SmallWorldBlock,
    pub null_model: NullModelComparison,
    pub mixing: MixingBlock,
}

#[derive(Debug, Serialize)]
pub struct HurstBlock {
    pub hurst: f64,
    pub classification: Persistence,
    pub fit: LinearFit,
    pub scales_used: usize,
}

#[derive(Debug, Serialize)]
pub struct ClusteringBlock {
    pub average: f64,
    /// ln c on ln k over nodes with degree <= the configured cap.
    pub log_fit: Option<LinearFit>,
    /// 1/c on k over all nodes with positive clustering.
    pub reciprocal_fit: Option<LinearFit>,
    pub excluded_low_degree: usize,
    pub excluded_zero_clustering: usize,
}

#[derive(Debug, Serialize)]
pub struct SmallWorldBlock {
    pub points: usize,
    pub fit_all: LinearFit,
    pub fit_small: Option<LinearFit>,
}

#[derive(Debug, Serialize)]
pub struct MixingBlock {
    pub assortativity: Option<f64>,
    pub isolated: usize,
    pub curve_points: usize,
}
