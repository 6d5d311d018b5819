use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::kernel::composite_unchecked;
use super::spatial::spatial_features;
use super::{KernelParams, SparseGraph};
use crate::error::{Error, Result};
use crate::hsi_io::SpectralCube;

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Distance first, then smaller index.
fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Exact `k` nearest spectral neighbors of every pixel, sorted nearest first.
pub(crate) fn nearest_neighbors(cube: &SpectralCube, k: usize) -> Vec<Vec<usize>> {
    let n = cube.pixels();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = cube.spectrum(i);
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (squared_distance(xi, cube.spectrum(j)), j))
                .collect();
            if cand.len() > k {
                cand.select_nth_unstable_by(k - 1, by_distance_then_index);
                cand.truncate(k);
            }
            cand.sort_unstable_by(by_distance_then_index);
            cand.into_iter().map(|(_, j)| j).collect()
        })
        .collect()
}

/// Union-kNN graph over spectral distance, weighted by the composite kernel.
///
/// `(i, j)` is an edge when either endpoint is among the other's `k` nearest
/// spectral neighbors. Equal distances are resolved toward the smaller index.
pub fn knn_graph(cube: &SpectralCube, params: &KernelParams) -> Result<SparseGraph> {
    params.validate()?;
    let n = cube.pixels();
    if n == 1 {
        return Ok(SparseGraph::from_edges(1, Vec::new())?.with_k(params.k));
    }
    if params.k >= n {
        return Err(Error::InvalidArgument(format!(
            "k = {} must be smaller than the pixel count {n}",
            params.k
        )));
    }
    let spatial = spatial_features(cube, params.spatial_radius, params.spatial_sigma)?;
    let neighbors = nearest_neighbors(cube, params.k);

    let mut pairs: Vec<(usize, usize)> = neighbors
        .iter()
        .enumerate()
        .flat_map(|(i, list)| list.iter().map(move |&j| (i.min(j), i.max(j))))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();

    let edges = pairs
        .into_par_iter()
        .map(|(i, j)| {
            let w = composite_unchecked(
                cube.spectrum(i),
                cube.spectrum(j),
                spatial.spectrum(i),
                spatial.spectrum(j),
                params,
            );
            (i, j, w)
        })
        .collect();
    Ok(SparseGraph::from_edges(n, edges)?.with_k(params.k))
}

/// Median Euclidean distance over `samples` seeded random pixel pairs.
///
/// Falls back to the largest sampled distance when the median is zero, and to
/// 1.0 when every sampled pair coincides.
pub fn median_pair_distance(cube: &SpectralCube, samples: usize, seed: u64) -> f64 {
    let n = cube.pixels();
    if n < 2 || samples == 0 {
        return 1.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dists: Vec<f64> = (0..samples)
        .map(|_| {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            squared_distance(cube.spectrum(i), cube.spectrum(j)).sqrt()
        })
        .collect();
    dists.sort_unstable_by(f64::total_cmp);
    let mid = dists.len() / 2;
    let median = if dists.len().is_multiple_of(2) { 0.5 * (dists[mid - 1] + dists[mid]) } else { dists[mid] };
    if median > 0.0 {
        median
    } else {
        let max = dists[dists.len() - 1];
        if max > 0.0 {
            max
        } else {
            1.0
        }
    }
}
