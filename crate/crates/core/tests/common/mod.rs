//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hsivis::correspondence::Correspondence;
use hsivis::graph::{knn_graph, KernelParams, SparseGraph};
use hsivis::hsi_io::{ColorImage, ColorSpace, SpectralCube};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cube(rng: &mut ChaCha8Rng, height: usize, width: usize, bands: usize) -> SpectralCube {
    let data = DMatrix::from_fn(bands, height * width, |_, _| rng.random_range(0.0..1.0));
    SpectralCube::new(height, width, data).unwrap()
}

pub fn random_lab(rng: &mut ChaCha8Rng, height: usize, width: usize) -> ColorImage {
    let data = DMatrix::from_fn(3, height * width, |_, _| rng.random_range(-1.0..1.0));
    ColorImage::new(ColorSpace::Lab, height, width, data).unwrap()
}

/// Union kNN edge set by sorting every candidate by (distance, index).
pub fn brute_knn_edges(cube: &SpectralCube, k: usize) -> Vec<(usize, usize)> {
    let n = cube.pixels();
    let x = cube.data();
    let mut edges = Vec::new();
    for i in 0..n {
        let mut cand: Vec<(f64, usize)> =
            (0..n).filter(|&j| j != i).map(|j| ((x.column(i) - x.column(j)).norm_squared(), j)).collect();
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in cand.iter().take(k) {
            edges.push((i.min(j), i.max(j)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

pub fn dense_w(graph: &SparseGraph) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(graph.n(), graph.n());
    for &(i, j, v) in graph.edges() {
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    w
}

pub fn dense_laplacian(graph: &SparseGraph) -> DMatrix<f64> {
    let w = dense_w(graph);
    let mut l = -w.clone();
    for i in 0..graph.n() {
        l[(i, i)] += w.row(i).sum();
    }
    l
}

/// Pairwise objective: `1/2 sum_ij W_ij |y_i - y_j|^2 + lambda sum_(i,j) in C |y_i - s_j|^2`.
pub fn pairwise_objective(y: &DMatrix<f64>, graph: &SparseGraph, corr: &Correspondence, s: &DMatrix<f64>, lambda: f64) -> f64 {
    let smooth: f64 = graph.edges().iter().map(|&(i, j, w)| w * (y.column(i) - y.column(j)).norm_squared()).sum();
    let fit: f64 = corr.pairs().iter().map(|&(i, j)| (y.column(i) - s.column(j)).norm_squared()).sum();
    smooth + lambda * fit
}

/// Dense constraint data: `C1` diagonal as a matrix and `S C'` (3 × n).
pub fn dense_constraints(corr: &Correspondence, s: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = corr.n();
    let mut c1 = DMatrix::zeros(n, n);
    let mut sc = DMatrix::zeros(3, n);
    for &(i, j) in corr.pairs() {
        c1[(i, i)] += 1.0;
        let col = sc.column(i) + s.column(j);
        sc.set_column(i, &col);
    }
    (c1, sc)
}

/// Minimizes the quadratic `tr(Z H Z') - 2 tr(Z B')` (gradient `2 Z H - 2 B`)
/// by Nesterov-accelerated gradient descent from zero.
pub fn accelerated_descent(h: &DMatrix<f64>, b: &DMatrix<f64>, iterations: usize) -> DMatrix<f64> {
    // Gershgorin bound on the largest eigenvalue of 2H
    let lip = 2.0 * (0..h.nrows()).map(|i| h.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / lip;
    let mut z = DMatrix::zeros(b.nrows(), b.ncols());
    let mut prev = z.clone();
    let mut t = 1.0f64;
    for _ in 0..iterations {
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let look = &z + (&z - &prev) * ((t - 1.0) / t_next);
        let grad = (&look * h - b) * 2.0;
        prev = std::mem::replace(&mut z, &look - grad * step);
        t = t_next;
    }
    z
}

/// Population Pearson correlation written out from its textbook definition.
pub fn brute_gamma(cube: &SpectralCube, lab: &DMatrix<f64>) -> f64 {
    let n = cube.pixels();
    let x = cube.data();
    let mut dx = Vec::new();
    let mut dy = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            dx.push((x.column(i) - x.column(j)).norm());
            dy.push((lab.column(i) - lab.column(j)).norm());
        }
    }
    let p = dx.len() as f64;
    let mx = dx.iter().sum::<f64>() / p;
    let my = dy.iter().sum::<f64>() / p;
    let cov = dx.iter().zip(&dy).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / p;
    let sx = (dx.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / p).sqrt();
    let sy = (dy.iter().map(|b| (b - my).powi(2)).sum::<f64>() / p).sqrt();
    cov / (sx * sy)
}

/// A small seeded solver instance with every graph component constrained.
pub struct Instance {
    pub cube: SpectralCube,
    pub graph: SparseGraph,
    pub corr: Correspondence,
    pub s: ColorImage,
}

pub fn oracle_instance(seed: u64) -> Instance {
    let mut rng = rng(seed);
    let height = rng.random_range(4..=7);
    let width = rng.random_range(4..=7);
    let bands = rng.random_range(3..=8);
    let k = rng.random_range(2..=5);
    let cube = random_cube(&mut rng, height, width, bands);
    let n = cube.pixels();
    let params = KernelParams { k, ..KernelParams::default() }.with_median_bandwidths(&cube, seed).unwrap();
    let graph = knn_graph(&cube, &params).unwrap();

    let m = rng.random_range(10..=30);
    let s = random_lab(&mut rng, 1, m);
    let target = (n as f64 * 0.2).ceil() as usize;
    let labels = graph.components();
    let mut constrained: Vec<usize> = (0..n).filter(|&v| labels[v] == v).collect();
    for v in rand::seq::index::sample(&mut rng, n, n).into_iter() {
        if constrained.len() >= target {
            break;
        }
        if !constrained.contains(&v) {
            constrained.push(v);
        }
    }
    let pairs = constrained.iter().map(|&i| (i, rng.random_range(0..m))).collect();
    let corr = Correspondence::new(n, m, pairs).unwrap();
    Instance { cube, graph, corr, s }
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hsivis")
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn hsivis")
}

pub fn run_ok(args: &[&str]) -> String {
    let out = run_cli(args);
    assert!(
        out.status.success(),
        "hsivis {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn path_str(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

pub fn file(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
