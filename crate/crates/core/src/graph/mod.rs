//! Spectral–spatial kNN graph and its Laplacian operator.

mod kernel;
mod knn;
mod spatial;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hsi_io::SpectralCube;

pub use kernel::{composite_kernel, rbf_kernel};
pub use knn::{knn_graph, median_pair_distance};
pub use spatial::spatial_features;

/// Number of random pixel pairs used to pick default bandwidths.
pub const BANDWIDTH_SAMPLES: usize = 1000;

/// Graph construction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// Weight of the spectral kernel; the spatial kernel gets `1 - mu`.
    pub mu: f64,
    pub delta_s: f64,
    pub delta_w: f64,
    pub k: usize,
    pub spatial_radius: usize,
    pub spatial_sigma: f64,
}

impl Default for KernelParams {
    /// Unit bandwidths; use [`KernelParams::with_median_bandwidths`] for data-driven ones.
    fn default() -> Self {
        Self { mu: 0.5, delta_s: 1.0, delta_w: 1.0, k: 10, spatial_radius: 2, spatial_sigma: 1.0 }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::InvalidArgument(format!("mu must lie in [0, 1], got {}", self.mu)));
        }
        for (name, v) in [("delta_s", self.delta_s), ("delta_w", self.delta_w), ("spatial_sigma", self.spatial_sigma)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(())
    }

    /// Sets `delta_s` / `delta_w` to the median spectral / spatial-feature pair
    /// distance over [`BANDWIDTH_SAMPLES`] seeded pairs.
    pub fn with_median_bandwidths(mut self, cube: &SpectralCube, seed: u64) -> Result<Self> {
        let spatial = spatial_features(cube, self.spatial_radius, self.spatial_sigma)?;
        self.delta_s = median_pair_distance(cube, BANDWIDTH_SAMPLES, seed);
        self.delta_w = median_pair_distance(&spatial, BANDWIDTH_SAMPLES, seed);
        Ok(self)
    }
}

/// Symmetric weighted adjacency over pixel nodes, stored once per unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    n: usize,
    k: Option<usize>,
    edges: Vec<(usize, usize, f64)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    degree: Vec<f64>,
}

impl SparseGraph {
    /// Builds the graph from `(i, j, w)` triples with `i < j`; duplicates are rejected.
    pub fn from_edges(n: usize, mut edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(i, j, w) in &edges {
            if i >= j || j >= n {
                return Err(Error::InvalidArgument(format!("edge ({i}, {j}) invalid for {n} nodes (need i < j < n)")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!("edge ({i}, {j}) has non-positive weight {w}")));
            }
        }
        edges.sort_unstable_by_key(|e| (e.0, e.1));
        if edges.windows(2).any(|e| (e[0].0, e[0].1) == (e[1].0, e[1].1)) {
            return Err(Error::InvalidArgument("duplicate edge".into()));
        }

        let mut counts = vec![0usize; n];
        for &(i, j, _) in &edges {
            counts[i] += 1;
            counts[j] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + counts[v];
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        // sorted edge order leaves every adjacency row sorted by neighbor index
        for &(i, j, w) in &edges {
            neighbors[fill[i]] = j;
            weights[fill[i]] = w;
            fill[i] += 1;
            neighbors[fill[j]] = i;
            weights[fill[j]] = w;
            fill[j] += 1;
        }
        let degree = (0..n).map(|v| weights[offsets[v]..offsets[v + 1]].iter().sum()).collect();
        Ok(Self { n, k: None, edges, offsets, neighbors, weights, degree })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Neighbor count the graph was built with, when known.
    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    /// Edges as `(i, j, w)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// `D_ii = sum_j W_ij`, accumulated in neighbor-index order.
    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Neighbors of `v` (ascending) and the matching weights.
    pub fn adjacency(&self, v: usize) -> (&[usize], &[f64]) {
        let range = self.offsets[v]..self.offsets[v + 1];
        (&self.neighbors[range.clone()], &self.weights[range])
    }

    /// Component label per node; labels are the smallest node index in each component.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut stack = Vec::new();
        for root in 0..self.n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = root;
            stack.push(root);
            while let Some(v) = stack.pop() {
                for &u in self.adjacency(v).0 {
                    if label[u] == usize::MAX {
                        label[u] = root;
                        stack.push(u);
                    }
                }
            }
        }
        label
    }

    /// Writes the debug dump: `n e` then one `i j w` line per edge.
    pub fn write_dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = format!("{} {}\n", self.n, self.edges.len());
        for &(i, j, w) in &self.edges {
            writeln!(text, "{i} {j} {w:.16e}").expect("writing to a String");
        }
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read_dump(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        let bad = |what: &str| Error::format(path, what.to_string());
        let head: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("empty graph dump"))?
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("bad graph header"))?;
        let [n, e] = head[..] else { return Err(bad("graph header must be `n e`")) };
        let mut edges = Vec::with_capacity(e);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let cells: Vec<&str> = line.split_whitespace().collect();
            let parsed = match cells[..] {
                [i, j, w] => i.parse().ok().zip(j.parse().ok()).zip(w.parse().ok()),
                _ => None,
            };
            let ((i, j), w) = parsed.ok_or_else(|| bad(&format!("bad edge line `{line}`")))?;
            edges.push((i, j, w));
        }
        if edges.len() != e {
            return Err(bad(&format!("header promises {e} edges, found {}", edges.len())));
        }
        Self::from_edges(n, edges)
    }
}

/// Right-multiplies `values` (one column per node) by the Laplacian `L = D - W`
/// without materializing it: column `j` of the result is
/// `D_jj v_j - sum_i W_ij v_i`.
pub fn laplacian_apply(graph: &SparseGraph, values: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if values.ncols() != graph.n {
        return Err(Error::DimensionMismatch(format!(
            "{} columns for a graph of {} nodes",
            values.ncols(),
            graph.n
        )));
    }
    let rows = values.nrows();
    let mut out = DMatrix::<f64>::zeros(rows, graph.n);
    if rows == 0 {
        return Ok(out);
    }
    out.as_mut_slice().par_chunks_mut(rows).enumerate().for_each(|(j, dst)| {
        let dj = graph.degree[j];
        for (o, &v) in dst.iter_mut().zip(values.column(j).iter()) {
            *o = dj * v;
        }
        let (nbrs, ws) = graph.adjacency(j);
        for (&i, &w) in nbrs.iter().zip(ws) {
            for (o, &v) in dst.iter_mut().zip(values.column(i).iter()) {
                *o -= w * v;
            }
        }
    });
    Ok(out)
}

/// Single-vector form of [`laplacian_apply`]: `out = L x`.
pub(crate) fn laplacian_apply_vec(graph: &SparseGraph, x: &[f64], out: &mut [f64]) {
    out.par_iter_mut().enumerate().for_each(|(j, o)| {
        let (nbrs, ws) = graph.adjacency(j);
        let mut acc = graph.degree[j] * x[j];
        for (&i, &w) in nbrs.iter().zip(ws) {
            acc -= w * x[i];
        }
        *o = acc;
    });
}
