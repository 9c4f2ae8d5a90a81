//! The full per-series pipeline behind `vgraph analyze`.

use vgraph::dfa::{estimate_hurst, DfaConfig, DfaResult};
use vgraph::distfit::{
    alpha_hurst_relation, bootstrap_pvalue, fit_powerlaw, fit_truncated_powerlaw, log_binned_pdf,
    AlphaHurstBand, DegreeTailFit, KMin, LogBinnedPdf,
};
use vgraph::metrics::{
    clustering, clustering_degree_relation, default_length_grid, global_stats, knn_curve,
    null_model_compare, small_world_scan, MixingReport, RelationPairs, SmallWorldScan,
};
use vgraph::regress::ols;
use vgraph::vg::build_vg_dc;
use vgraph::{LinearFit, Result, TimeSeries};

use crate::report::{ClusteringBlock, HurstBlock, MixingBlock, SeriesBlock, SmallWorldBlock};

/// Which tail families to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyChoice {
    PowerLaw,
    Truncated,
    Both,
}

impl FamilyChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyChoice::PowerLaw => "power_law",
            FamilyChoice::Truncated => "truncated_power_law",
            FamilyChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub seed: u64,
    pub replicas: usize,
    pub realizations: usize,
    pub bins_per_decade: usize,
    /// Small-world window grid; defaults to 50 log-spaced lengths on [10, T].
    pub lengths: Option<Vec<usize>>,
    pub family: FamilyChoice,
    pub k_min: KMin,
    /// Degree cap for the ln c - ln k fit (the relation is linear only
    /// below the hub regime).
    pub log_fit_degree_cap: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            replicas: 1000,
            realizations: 20,
            bins_per_decade: 10,
            lengths: None,
            family: FamilyChoice::Both,
            k_min: KMin::Auto,
            log_fit_degree_cap: 100,
        }
    }
}

/// Everything the figure CSV writers need, kept separate from the report.
pub struct FigureData {
    pub pdf: LogBinnedPdf,
    pub tail_fits: Vec<DegreeTailFit>,
    pub degree_total: usize,
    pub max_degree: usize,
    /// (k_i, c_i) in node order.
    pub clustering_pairs: Vec<(usize, f64)>,
    /// (k_i, 1/c_i) in node order, positive clustering only.
    pub reciprocal_pairs: Vec<(f64, f64)>,
    pub small_world: SmallWorldScan,
    pub mixing: MixingReport,
    pub dfa: DfaResult,
}

pub struct SeriesAnalysis {
    pub block: SeriesBlock,
    pub figures: FigureData,
}

pub fn analyze_series(series: &TimeSeries, cfg: &PipelineConfig) -> Result<SeriesAnalysis> {
    let dfa_cfg = DfaConfig::default_for_len(series.len())?;
    let dfa = estimate_hurst(series, &dfa_cfg)?;

    let graph = build_vg_dc(series);
    let stats = global_stats(&graph);
    let clust = clustering(&graph);
    let relation = clustering_degree_relation(&clust, &graph)?;
    let (log_fit, reciprocal_fit) = relation_fits(&relation, cfg.log_fit_degree_cap);

    let degrees: Vec<f64> = graph.degrees().iter().map(|&d| d as f64).collect();
    let pdf = log_binned_pdf(&degrees, cfg.bins_per_decade)?;
    let tail_fits = fit_families(&degrees, cfg)?;
    let alpha_hurst: Vec<AlphaHurstBand> = tail_fits
        .iter()
        .map(|f| alpha_hurst_relation(f.alpha, dfa.hurst))
        .collect::<Result<_>>()?;

    let grid = cfg
        .lengths
        .clone()
        .unwrap_or_else(|| default_length_grid(series.len()));
    let small_world = small_world_scan(series, &grid)?;
    let null_model = null_model_compare(&graph, cfg.realizations, cfg.seed)?;
    let mixing = knn_curve(&graph);

    let block = SeriesBlock {
        label: series.label().to_string(),
        length: series.len(),
        hurst: HurstBlock {
            hurst: dfa.hurst,
            classification: dfa.classification(),
            fit: dfa.fit,
            scales_used: dfa.points.len(),
        },
        global: stats,
        clustering: ClusteringBlock {
            average: clust.average,
            log_fit,
            reciprocal_fit,
            excluded_low_degree: relation.excluded_low_degree,
            excluded_zero_clustering: relation.excluded_zero_clustering,
        },
        tail_fits: tail_fits.clone(),
        alpha_hurst,
        small_world: SmallWorldBlock {
            points: small_world.points.len(),
            fit_all: small_world.fit_all,
            fit_small: small_world.fit_small,
        },
        null_model,
        mixing: MixingBlock {
            assortativity: mixing.assortativity,
            isolated: mixing.isolated,
            curve_points: mixing.curve.len(),
        },
    };

    let clustering_pairs: Vec<(usize, f64)> = (0..graph.node_count())
        .map(|v| (graph.degree(v), clust.local[v]))
        .collect();

    Ok(SeriesAnalysis {
        block,
        figures: FigureData {
            pdf,
            tail_fits,
            degree_total: graph.node_count(),
            max_degree: stats.max_degree,
            clustering_pairs,
            reciprocal_pairs: relation.reciprocal_pairs,
            small_world,
            mixing,
            dfa,
        },
    })
}

fn relation_fits(
    relation: &RelationPairs,
    degree_cap: usize,
) -> (Option<LinearFit>, Option<LinearFit>) {
    let cap = (degree_cap as f64).ln() * (1.0 + 1e-12);
    let capped: Vec<&(f64, f64)> = relation
        .log_pairs
        .iter()
        .filter(|(ln_k, _)| *ln_k <= cap)
        .collect();
    let log_fit = if capped.len() >= 3 {
        let x: Vec<f64> = capped.iter().map(|p| p.0).collect();
        let y: Vec<f64> = capped.iter().map(|p| p.1).collect();
        ols(&x, &y).ok()
    } else {
        None
    };
    let reciprocal_fit = if relation.reciprocal_pairs.len() >= 3 {
        let x: Vec<f64> = relation.reciprocal_pairs.iter().map(|p| p.0).collect();
        let y: Vec<f64> = relation.reciprocal_pairs.iter().map(|p| p.1).collect();
        ols(&x, &y).ok()
    } else {
        None
    };
    (log_fit, reciprocal_fit)
}

fn fit_families(degrees: &[f64], cfg: &PipelineConfig) -> Result<Vec<DegreeTailFit>> {
    let mut fits = Vec::new();
    if matches!(cfg.family, FamilyChoice::PowerLaw | FamilyChoice::Both) {
        fits.push(fit_powerlaw(degrees, cfg.k_min)?);
    }
    if matches!(cfg.family, FamilyChoice::Truncated | FamilyChoice::Both) {
        fits.push(fit_truncated_powerlaw(degrees, cfg.k_min)?);
    }
    if cfg.replicas >= 100 {
        for fit in &mut fits {
            fit.p_value = Some(bootstrap_pvalue(degrees, fit, cfg.replicas, cfg.seed)?);
        }
    }
    Ok(fits)
}

/// Degrees of a graph reconstructed from an `i j` edge-list file.
pub fn degrees_from_edge_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut degree: Vec<u64> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> std::result::Result<usize, String> {
            tok.ok_or_else(|| format!("line {}: expected 'i j'", lineno + 1))?
                .parse::<usize>()
                .map_err(|_| format!("line {}: expected 'i j'", lineno + 1))
        };
        let i = parse(parts.next())?;
        let j = parse(parts.next())?;
        let hi = i.max(j);
        if degree.len() <= hi {
            degree.resize(hi + 1, 0);
        }
        degree[i] += 1;
        degree[j] += 1;
    }
    if degree.is_empty() {
        return Err("edge list is empty".to_string());
    }
    Ok(degree.into_iter().map(|d| d as f64).collect())
}
