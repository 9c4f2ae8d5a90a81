//! Structural statistics on visibility graphs: global quantities, clustering,
//! shortest-path and small-world diagnostics, G(N, M) null models, and
//! degree-mixing measures.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regress::{ols, LinearFit};
use crate::series::TimeSeries;
use crate::vg::{build_vg_dc, VisibilityGraph};

/// Node count, edge count, density, average and maximum degree.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GlobalStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub density: f64,
    pub average_degree: f64,
    pub max_degree: usize,
}

pub fn global_stats(graph: &VisibilityGraph) -> GlobalStats {
    let n = graph.node_count();
    let m = graph.edge_count();
    GlobalStats {
        node_count: n,
        edge_count: m,
        density: if n > 1 {
            2.0 * m as f64 / (n as f64 * (n as f64 - 1.0))
        } else {
            0.0
        },
        average_degree: if n > 0 { 2.0 * m as f64 / n as f64 } else { 0.0 },
        max_degree: (0..n).map(|v| graph.degree(v)).max().unwrap_or(0),
    }
}

/// Per-node clustering coefficients and triangle counts.
///
/// c_i = 2 T_i / (k_i (k_i - 1)) for k_i >= 2, and 0 otherwise; the average
/// runs over every node.
#[derive(Debug, Clone, Serialize)]
pub struct ClusteringReport {
    pub local: Vec<f64>,
    pub triangles: Vec<u64>,
    pub average: f64,
}

pub fn clustering(graph: &VisibilityGraph) -> ClusteringReport {
    let n = graph.node_count();
    let mut triangles = vec![0u64; n];
    for u in 0..n {
        let nu = graph.neighbors(u);
        for &v in nu.iter().filter(|&&v| (v as usize) > u) {
            // sorted-list intersection of N(u) and N(v)
            let nv = graph.neighbors(v as usize);
            let (mut a, mut b) = (0, 0);
            while a < nu.len() && b < nv.len() {
                match nu[a].cmp(&nv[b]) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        let w = nu[a] as usize;
                        // count each triangle once per edge orientation u < v,
                        // crediting only w > v so every triangle contributes
                        // exactly once to each member
                        if w > v as usize {
                            triangles[u] += 1;
                            triangles[v as usize] += 1;
                            triangles[w] += 1;
                        }
                        a += 1;
                        b += 1;
                    }
                }
            }
        }
    }
    let local: Vec<f64> = (0..n)
        .map(|v| {
            let k = graph.degree(v) as f64;
            if k >= 2.0 {
                2.0 * triangles[v] as f64 / (k * (k - 1.0))
            } else {
                0.0
            }
        })
        .collect();
    let average = if n > 0 { local.iter().sum::<f64>() / n as f64 } else { 0.0 };
    ClusteringReport {
        local,
        triangles,
        average,
    }
}

/// Mean local clustering per exact degree, for the k vs c curve export.
pub fn mean_clustering_by_degree(
    report: &ClusteringReport,
    graph: &VisibilityGraph,
) -> Vec<(usize, f64)> {
    let mut grouped: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for v in 0..graph.node_count() {
        let slot = grouped.entry(graph.degree(v)).or_insert((0.0, 0));
        slot.0 += report.local[v];
        slot.1 += 1;
    }
    grouped
        .into_iter()
        .map(|(k, (sum, count))| (k, sum / count as f64))
        .collect()
}

/// Pair lists relating clustering to degree, ready for regression.
#[derive(Debug, Clone, Serialize)]
pub struct RelationPairs {
    /// (ln k_i, ln c_i) for nodes with k_i >= 2 and c_i > 0.
    pub log_pairs: Vec<(f64, f64)>,
    /// (k_i, 1/c_i) for nodes with c_i > 0.
    pub reciprocal_pairs: Vec<(f64, f64)>,
    pub excluded_low_degree: usize,
    pub excluded_zero_clustering: usize,
}

/// Extract the (ln c, ln k) and (1/c, k) pair lists, excluding nodes where
/// either quantity is undefined.
pub fn clustering_degree_relation(
    report: &ClusteringReport,
    graph: &VisibilityGraph,
) -> Result<RelationPairs> {
    let mut log_pairs = Vec::new();
    let mut reciprocal_pairs = Vec::new();
    let mut excluded_low_degree = 0;
    let mut excluded_zero_clustering = 0;
    for v in 0..graph.node_count() {
        let k = graph.degree(v);
        if k < 2 {
            excluded_low_degree += 1;
            continue;
        }
        let c = report.local[v];
        if c <= 0.0 {
            excluded_zero_clustering += 1;
            continue;
        }
        log_pairs.push(((k as f64).ln(), c.ln()));
        reciprocal_pairs.push((k as f64, 1.0 / c));
    }
    if log_pairs.len() < 3 {
        return Err(Error::TooFewQualifyingNodes {
            needed: 3,
            got: log_pairs.len(),
        });
    }
    Ok(RelationPairs {
        log_pairs,
        reciprocal_pairs,
        excluded_low_degree,
        excluded_zero_clustering,
    })
}

/// Mean shortest-path length over connected node pairs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathLengths {
    pub mean: f64,
    pub connected_pairs: u64,
    pub total_pairs: u64,
}

impl PathLengths {
    pub fn connected_fraction(&self) -> f64 {
        if self.total_pairs == 0 {
            1.0
        } else {
            self.connected_pairs as f64 / self.total_pairs as f64
        }
    }
}

/// Average shortest path length by breadth-first search from every node.
/// Distances accumulate in integers, so the result is independent of the
/// parallel schedule. Disconnected pairs are excluded and reported.
pub fn avg_shortest_path(graph: &VisibilityGraph) -> PathLengths {
    let n = graph.node_count();
    if n < 2 {
        return PathLengths {
            mean: 0.0,
            connected_pairs: 0,
            total_pairs: 0,
        };
    }
    let per_source: Vec<(u64, u64)> = (0..n)
        .into_par_iter()
        .map(|src| {
            let mut dist = vec![u32::MAX; n];
            let mut queue = VecDeque::new();
            dist[src] = 0;
            queue.push_back(src as u32);
            let mut sum = 0u64;
            let mut reached = 0u64;
            while let Some(u) = queue.pop_front() {
                let d = dist[u as usize] + 1;
                for &v in graph.neighbors(u as usize) {
                    if dist[v as usize] == u32::MAX {
                        dist[v as usize] = d;
                        if (v as usize) > src {
                            sum += d as u64;
                            reached += 1;
                        }
                        queue.push_back(v);
                    }
                }
            }
            (sum, reached)
        })
        .collect();
    let sum: u64 = per_source.iter().map(|p| p.0).sum();
    let connected_pairs: u64 = per_source.iter().map(|p| p.1).sum();
    let total_pairs = n as u64 * (n as u64 - 1) / 2;
    PathLengths {
        mean: if connected_pairs > 0 {
            sum as f64 / connected_pairs as f64
        } else {
            0.0
        },
        connected_pairs,
        total_pairs,
    }
}

/// One point of the small-world scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallWorldPoint {
    pub window_len: usize,
    pub mean_path_length: f64,
    pub windows: usize,
}

/// L(N) over a grid of window lengths with fits of L against log10 N.
#[derive(Debug, Clone, Serialize)]
pub struct SmallWorldScan {
    pub points: Vec<SmallWorldPoint>,
    pub fit_all: LinearFit,
    /// Fit restricted to window lengths <= 500; absent when fewer than
    /// three such points exist.
    pub fit_small: Option<LinearFit>,
}

/// 50 log-spaced window lengths on [10, t].
pub fn default_length_grid(t: usize) -> Vec<usize> {
    crate::dfa::log_spaced_integers(10, t, 50)
}

/// For each window length N, build visibility graphs over the floor(T/N)
/// consecutive non-overlapping windows and average their path lengths.
pub fn small_world_scan(series: &TimeSeries, lengths: &[usize]) -> Result<SmallWorldScan> {
    if lengths.is_empty() {
        return Err(Error::EmptyLengths);
    }
    let t = series.len();
    let mut grid: Vec<usize> = lengths.to_vec();
    grid.sort_unstable();
    grid.dedup();
    for &len in &grid {
        if len < 10 || len > t {
            return Err(Error::BadWindowLength(len, t));
        }
    }

    let points: Vec<SmallWorldPoint> = grid
        .par_iter()
        .map(|&len| {
            let windows = t / len;
            let mean: f64 = (0..windows)
                .into_par_iter()
                .map(|w| {
                    let window = series.slice(w * len, len).expect("window in range");
                    avg_shortest_path(&build_vg_dc(&window)).mean
                })
                .sum::<f64>()
                / windows as f64;
            SmallWorldPoint {
                window_len: len,
                mean_path_length: mean,
                windows,
            }
        })
        .collect();

    let log_n: Vec<f64> = points.iter().map(|p| (p.window_len as f64).log10()).collect();
    let l: Vec<f64> = points.iter().map(|p| p.mean_path_length).collect();
    let fit_all = ols(&log_n, &l)?;

    let small: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.window_len <= 500)
        .map(|p| ((p.window_len as f64).log10(), p.mean_path_length))
        .collect();
    let fit_small = if small.len() >= 3 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = small.into_iter().unzip();
        ols(&xs, &ys).ok()
    } else {
        None
    };

    Ok(SmallWorldScan {
        points,
        fit_all,
        fit_small,
    })
}

/// Uniform simple graph with exactly `m` edges on `n` nodes, deterministic
/// per seed. When more than half of all possible edges are requested the
/// complement is sampled instead.
pub fn random_gnm(n: usize, m: usize, seed: u64) -> Result<VisibilityGraph> {
    let max = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max {
        return Err(Error::TooManyEdges(m, max, n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample_complement = m > max / 2;
    let target = if sample_complement { max - m } else { m };

    let mut chosen = HashSet::with_capacity(target * 2);
    let mut picked: Vec<(u32, u32)> = Vec::with_capacity(target);
    while picked.len() < target {
        let a = rng.random_range(0..n as u32);
        let b = rng.random_range(0..n as u32);
        if a == b {
            continue;
        }
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        let key = i as u64 * n as u64 + j as u64;
        if chosen.insert(key) {
            picked.push((i, j));
        }
    }

    if sample_complement {
        let mut edges = Vec::with_capacity(m);
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                if !chosen.contains(&(i as u64 * n as u64 + j as u64)) {
                    edges.push((i, j));
                }
            }
        }
        Ok(VisibilityGraph::from_edges(n, &edges))
    } else {
        Ok(VisibilityGraph::from_edges(n, &picked))
    }
}

/// Clustering and path length of a graph against G(N, M) null models with
/// matched node and edge counts.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NullModelComparison {
    pub l_actual: f64,
    pub l_random: f64,
    pub c_actual: f64,
    pub c_random: f64,
    pub realizations: usize,
    /// Fraction of node pairs connected in the null models (path lengths
    /// average over connected pairs only).
    pub random_connected_fraction: f64,
}

/// Derive an independent RNG stream for a realization or replica index.
pub(crate) fn stream_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 of the offset seed
    let mut z = seed
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn null_model_compare(
    graph: &VisibilityGraph,
    realizations: usize,
    seed: u64,
) -> Result<NullModelComparison> {
    let realizations = realizations.max(1);
    let l_actual = avg_shortest_path(graph).mean;
    let c_actual = clustering(graph).average;

    let n = graph.node_count();
    let m = graph.edge_count();
    let per: Vec<(f64, f64, f64)> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let g = random_gnm(n, m, stream_seed(seed, r as u64))?;
            let paths = avg_shortest_path(&g);
            Ok((
                paths.mean,
                clustering(&g).average,
                paths.connected_fraction(),
            ))
        })
        .collect::<Result<_>>()?;
    let k = realizations as f64;
    Ok(NullModelComparison {
        l_actual,
        l_random: per.iter().map(|p| p.0).sum::<f64>() / k,
        c_actual,
        c_random: per.iter().map(|p| p.1).sum::<f64>() / k,
        realizations,
        random_connected_fraction: per.iter().map(|p| p.2).sum::<f64>() / k,
    })
}

/// Degree assortativity: Pearson correlation of endpoint degrees over the
/// edge list, each edge counted in both orientations. `None` marks the
/// degenerate case of zero degree variance over edge endpoints (regular
/// graphs), which is a different claim than r = 0.
pub fn assortativity(graph: &VisibilityGraph) -> Result<Option<f64>> {
    if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    // integer accumulation keeps the closed-form cases exact
    let mut count: i128 = 0;
    let mut sum_x: i128 = 0;
    let mut sum_xx: i128 = 0;
    let mut sum_xy: i128 = 0;
    for (i, j) in graph.edges() {
        let ki = graph.degree(i as usize) as i128;
        let kj = graph.degree(j as usize) as i128;
        count += 2;
        sum_x += ki + kj;
        sum_xx += ki * ki + kj * kj;
        sum_xy += 2 * ki * kj;
    }
    // symmetric orientation makes the x and y moments identical
    let num = count * sum_xy - sum_x * sum_x;
    let den = count * sum_xx - sum_x * sum_x;
    if den == 0 {
        return Ok(None);
    }
    Ok(Some(num as f64 / den as f64))
}

/// One point of the mean nearest-neighbor-degree curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KnnPoint {
    pub degree: usize,
    pub mean_knn: f64,
    pub count: usize,
}

/// Assortativity, per-node mean neighbor degree, and the degree-conditioned
/// curve. Isolated nodes carry NaN in `knn` and are excluded from the curve.
#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub assortativity: Option<f64>,
    pub knn: Vec<f64>,
    pub curve: Vec<KnnPoint>,
    pub isolated: usize,
}

pub fn knn_curve(graph: &VisibilityGraph) -> MixingReport {
    let n = graph.node_count();
    let mut knn = Vec::with_capacity(n);
    let mut grouped: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    let mut isolated = 0;
    for v in 0..n {
        let k = graph.degree(v);
        if k == 0 {
            isolated += 1;
            knn.push(f64::NAN);
            continue;
        }
        let total: u64 = graph
            .neighbors(v)
            .iter()
            .map(|&w| graph.degree(w as usize) as u64)
            .sum();
        let mean = total as f64 / k as f64;
        knn.push(mean);
        let slot = grouped.entry(k).or_insert((0.0, 0));
        slot.0 += mean;
        slot.1 += 1;
    }
    let curve = grouped
        .into_iter()
        .map(|(degree, (sum, count))| KnnPoint {
            degree,
            mean_knn: sum / count as f64,
            count,
        })
        .collect();
    let assortativity = if graph.edge_count() == 0 {
        None
    } else {
        assortativity(graph).ok().flatten()
    };
    MixingReport {
        assortativity,
        knn,
        curve,
        isolated,
    }
}
