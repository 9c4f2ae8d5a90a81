//! Visibility-graph construction and export.
//!
//! Nodes are time indices; an edge joins two points when the straight chord
//! between them passes strictly above every intermediate point. Collinear or
//! equal-valued intermediate points block visibility, so a constant or
//! linearly ramping series yields the path graph. Three constructors share
//! the same predicate: a cubic reference oracle, a quadratic running-maximum
//! slope sweep, and a divide-and-conquer on range maxima.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use flate2::write::GzEncoder;
use flate2::Compression;

use crate::series::TimeSeries;

/// Undirected simple graph in compressed sparse adjacency form.
///
/// Neighbor lists are sorted ascending; every consecutive index pair of a
/// visibility graph is an edge, so graphs built from series are connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    edge_count: usize,
}

impl VisibilityGraph {
    /// Assemble from unique undirected edges (i < j for each pair).
    pub fn from_edges(node_count: usize, edges: &[(u32, u32)]) -> Self {
        assert!(node_count <= u32::MAX as usize);
        let mut degree = vec![0usize; node_count];
        for &(i, j) in edges {
            debug_assert!(i < j && (j as usize) < node_count);
            degree[i as usize] += 1;
            degree[j as usize] += 1;
        }
        let mut offsets = vec![0usize; node_count + 1];
        for v in 0..node_count {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; 2 * edges.len()];
        for &(i, j) in edges {
            neighbors[cursor[i as usize]] = j;
            cursor[i as usize] += 1;
            neighbors[cursor[j as usize]] = i;
            cursor[j as usize] += 1;
        }
        for v in 0..node_count {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        VisibilityGraph {
            offsets,
            neighbors,
            edge_count: edges.len(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }

    /// Edges as (i, j) with i < j, ordered by i then j.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.node_count() as u32).flat_map(move |i| {
            self.neighbors(i as usize)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }
}

/// Visibility test between indices i < j: every intermediate point must lie
/// strictly below the chord. The comparison is the chord condition scaled by
/// the positive span (j - i), which keeps integer-valued series exact.
pub fn visible(series: &TimeSeries, i: usize, j: usize) -> bool {
    assert!(i < j && j < series.len());
    let x = series.values();
    let span = (j - i) as f64;
    for k in i + 1..j {
        let lhs = x[k] * span;
        let rhs = x[j] * span + (x[i] - x[j]) * ((j - k) as f64);
        if lhs >= rhs {
            return false;
        }
    }
    true
}

/// Cubic reference constructor: test every pair directly. Testing aid.
pub fn build_vg_oracle(series: &TimeSeries) -> VisibilityGraph {
    let n = series.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if visible(series, i, j) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    VisibilityGraph::from_edges(n, &edges)
}

/// Quadratic sweep: for each anchor i, scan rightward keeping the maximum
/// chord slope seen so far; j is visible from i exactly when slope(i, j)
/// strictly exceeds that maximum.
pub fn build_vg_sweep(series: &TimeSeries) -> VisibilityGraph {
    let x = series.values();
    let n = x.len();
    let mut edges = Vec::new();
    for i in 0..n - 1 {
        let mut max_slope = f64::NEG_INFINITY;
        for j in i + 1..n {
            let slope = (x[j] - x[i]) / ((j - i) as f64);
            if slope > max_slope {
                edges.push((i as u32, j as u32));
                max_slope = slope;
            }
        }
    }
    VisibilityGraph::from_edges(n, &edges)
}

/// Divide-and-conquer constructor. The range maximum (ties to the smallest
/// index) blocks all visibility across it, so it suffices to connect the
/// maximum to what it sees by two linear sweeps and recurse on both sides.
/// Expected O(T log T) on noisy data, O(T^2) worst case. Iterative work
/// list, so recursion depth never fails.
pub fn build_vg_dc(series: &TimeSeries) -> VisibilityGraph {
    let x = series.values();
    let n = x.len();
    let mut edges = Vec::new();
    let mut ranges = vec![(0usize, n - 1)];
    while let Some((lo, hi)) = ranges.pop() {
        if lo >= hi {
            continue;
        }
        let mut m = lo;
        for k in lo + 1..=hi {
            if x[k] > x[m] {
                m = k;
            }
        }
        // leftward sweep from the maximum
        let mut best = f64::NEG_INFINITY;
        for k in (lo..m).rev() {
            let slope = (x[k] - x[m]) / ((m - k) as f64);
            if slope > best {
                edges.push((k as u32, m as u32));
                best = slope;
            }
        }
        // rightward sweep
        let mut best = f64::NEG_INFINITY;
        for j in m + 1..=hi {
            let slope = (x[j] - x[m]) / ((j - m) as f64);
            if slope > best {
                edges.push((m as u32, j as u32));
                best = slope;
            }
        }
        if m > lo {
            ranges.push((lo, m - 1));
        }
        if m < hi {
            ranges.push((m + 1, hi));
        }
    }
    VisibilityGraph::from_edges(n, &edges)
}

/// Write one `i j` line per edge (i < j, ordered by i then j); returns the
/// number of lines written.
pub fn export_edgelist<W: Write>(graph: &VisibilityGraph, mut sink: W) -> std::io::Result<usize> {
    let mut written = 0usize;
    for (i, j) in graph.edges() {
        writeln!(sink, "{i} {j}")?;
        written += 1;
    }
    Ok(written)
}

/// Path-based export; gzip-compressed when the path ends in `.gz`.
pub fn export_edgelist_path(graph: &VisibilityGraph, path: &Path) -> std::io::Result<usize> {
    let file = File::create(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut enc = GzEncoder::new(BufWriter::new(file), Compression::default());
        let n = export_edgelist(graph, &mut enc)?;
        enc.finish()?.flush()?;
        Ok(n)
    } else {
        let mut out = BufWriter::new(file);
        let n = export_edgelist(graph, &mut out)?;
        out.flush()?;
        Ok(n)
    }
}
