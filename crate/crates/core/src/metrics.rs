//! Preservation of distance: correlation between pairwise spectral distances
//! and pairwise Lαβ distances.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hsi_io::{ColorImage, ColorSpace, SpectralCube};

/// Default number of sampled pixel pairs.
pub const DEFAULT_PAIR_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairBudget {
    All,
    Count(usize),
}

impl Default for PairBudget {
    fn default() -> Self {
        PairBudget::Count(DEFAULT_PAIR_BUDGET)
    }
}

impl FromStr for PairBudget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(PairBudget::All);
        }
        match s.parse::<usize>() {
            Ok(v) if v >= 2 => Ok(PairBudget::Count(v)),
            _ => Err(Error::InvalidArgument(format!("pair budget must be an integer >= 2 or `all`, got `{s}`"))),
        }
    }
}

impl fmt::Display for PairBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairBudget::All => f.write_str("all"),
            PairBudget::Count(c) => write!(f, "{c}"),
        }
    }
}

/// Paired distance vectors behind the metric.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSample {
    pub pair_count: usize,
    /// Spectral distances.
    pub x: Vec<f64>,
    /// Lαβ distances.
    pub y: Vec<f64>,
    pub seed: u64,
}

/// First pair index of row `i` in the row-major enumeration of `i < j`.
fn row_offset(i: u64, n: u64) -> u64 {
    i * (2 * n - i - 1) / 2
}

fn decode_pair(k: u64, n: u64) -> (usize, usize) {
    // largest i with row_offset(i) <= k; row_offset(n - 1) is the pair count, above any k
    let (mut lo, mut hi) = (0u64, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if row_offset(mid, n) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = lo;
    let j = i + 1 + (k - row_offset(i, n));
    (i as usize, j as usize)
}

fn euclid(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> f64 {
    a.zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Samples `budget` distinct unordered pixel pairs (all of them when the
/// budget covers every pair) and returns their distances in pair-index order.
pub fn distance_sample(cube: &SpectralCube, y_lab: &ColorImage, budget: PairBudget, seed: u64) -> Result<DistanceSample> {
    y_lab.expect_space(ColorSpace::Lab)?;
    let n = cube.pixels();
    if y_lab.pixels() != n {
        return Err(Error::DimensionMismatch(format!("cube has {n} pixels, image {}", y_lab.pixels())));
    }
    if n < 2 {
        return Err(Error::UndefinedMetric("need at least two pixels".into()));
    }
    let total = (n as u64) * (n as u64 - 1) / 2;
    let pair_ids: Vec<u64> = match budget {
        PairBudget::Count(c) if c < 2 => {
            return Err(Error::InvalidArgument(format!("pair budget must be at least 2, got {c}")))
        }
        PairBudget::Count(c) if (c as u64) < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ids: Vec<u64> =
                rand::seq::index::sample(&mut rng, total as usize, c).into_iter().map(|k| k as u64).collect();
            ids.sort_unstable();
            ids
        }
        _ => (0..total).collect(),
    };

    let lab = y_lab.data();
    let (x, y): (Vec<f64>, Vec<f64>) = pair_ids
        .par_iter()
        .map(|&k| {
            let (i, j) = decode_pair(k, n as u64);
            let dx = euclid(cube.spectrum(i).iter().copied(), cube.spectrum(j).iter().copied());
            let dy = euclid(lab.column(i).iter().copied(), lab.column(j).iter().copied());
            (dx, dy)
        })
        .unzip();
    Ok(DistanceSample { pair_count: x.len(), x, y, seed })
}

/// Pearson correlation of the sampled distance vectors, population convention.
pub fn gamma(sample: &DistanceSample) -> Result<f64> {
    let p = sample.x.len() as f64;
    if sample.x.is_empty() || sample.x.len() != sample.y.len() {
        return Err(Error::UndefinedMetric("empty or mismatched distance sample".into()));
    }
    let mx = sample.x.iter().sum::<f64>() / p;
    let my = sample.y.iter().sum::<f64>() / p;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in sample.x.iter().zip(&sample.y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if !(sxx > 0.0) {
        return Err(Error::UndefinedMetric("spectral distances have zero variance".into()));
    }
    if !(syy > 0.0) {
        return Err(Error::UndefinedMetric("color distances have zero variance (constant image?)".into()));
    }
    Ok((sxy / p) / ((sxx / p).sqrt() * (syy / p).sqrt()))
}

pub fn preservation_of_distance(cube: &SpectralCube, y_lab: &ColorImage, budget: PairBudget, seed: u64) -> Result<f64> {
    gamma(&distance_sample(cube, y_lab, budget, seed)?)
}

/// `gamma=<v> pairs=<P> seed=<s>`
pub fn report_line(gamma: f64, sample: &DistanceSample) -> String {
    format!("gamma={gamma} pairs={} seed={}", sample.pair_count, sample.seed)
}
