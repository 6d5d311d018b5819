//! Sparse pixel correspondence between a cube and a reference image.

mod homography;

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hsi_io::{pixel_coords, pixel_index};

pub use homography::{
    fit_homography, pairs_from_homography, ransac_homography, read_homography, write_homography, Homography,
    RansacFit,
};

/// Height and width of a pixel grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridShape {
    pub height: usize,
    pub width: usize,
}

impl GridShape {
    pub fn new(height: usize, width: usize) -> Self {
        Self { height, width }
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }
}

/// Binary pairing between cube pixels `i < n` and reference pixels `j < m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    n: usize,
    m: usize,
    pairs: Vec<(usize, usize)>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
}

impl Correspondence {
    /// Duplicate pairs collapse to one; at least one pair is required.
    pub fn new(n: usize, m: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n || j >= m) {
            return Err(Error::InvalidArgument(format!("pair ({i}, {j}) out of range for n = {n}, m = {m}")));
        }
        pairs.sort_unstable();
        pairs.dedup();
        if pairs.is_empty() {
            return Err(Error::InvalidArgument("correspondence needs at least one pair".into()));
        }
        let mut row_sums = vec![0; n];
        let mut col_sums = vec![0; m];
        for &(i, j) in &pairs {
            row_sums[i] += 1;
            col_sums[j] += 1;
        }
        Ok(Self { n, m, pairs, row_sums, col_sums })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Sorted, distinct `(cube pixel, reference pixel)` pairs.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Diagonal of `C1`: number of pairs per cube pixel.
    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    /// Diagonal of `C2`: number of pairs per reference pixel.
    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }
}

/// `ceil(fraction * n)`, ignoring float noise in the last few ulps.
pub(crate) fn sample_count(fraction: f64, n: usize) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("fraction must lie in (0, 1], got {fraction}")));
    }
    let exact = fraction * n as f64;
    let nearest = exact.round();
    let count = if (exact - nearest).abs() <= 1e-9 * exact.max(1.0) { nearest } else { exact.ceil() };
    Ok((count as usize).clamp(1, n.max(1)))
}

/// Seeded uniform sample of distinct indices in `[0, n)`, ascending.
pub(crate) fn sample_indices(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, n, count).into_vec();
    idx.sort_unstable();
    idx
}

/// Pairs `(i, i)` for `ceil(fraction * n)` seeded pixels of two aligned grids.
pub fn sample_aligned(n: usize, fraction: f64, seed: u64) -> Result<Correspondence> {
    let count = sample_count(fraction, n)?;
    let pairs = sample_indices(n, count, seed).into_iter().map(|i| (i, i)).collect();
    Correspondence::new(n, n, pairs)
}

/// Reads `hsi_row,hsi_col,ref_row,ref_col` lines; `#` lines are comments.
pub fn read_pairs(path: impl AsRef<Path>, cube: GridShape, reference: GridShape) -> Result<Correspondence> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<usize> = line
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::format(path, format!("line {lineno}: expected four non-negative integers, got `{line}`")))?;
        let [hr, hc, rr, rc] = cells[..] else {
            return Err(Error::format(path, format!("line {lineno}: expected 4 fields, got {}", cells.len())));
        };
        if hr >= cube.height || hc >= cube.width {
            return Err(Error::format(
                path,
                format!("line {lineno}: cube coordinate ({hr}, {hc}) outside {}x{}", cube.height, cube.width),
            ));
        }
        if rr >= reference.height || rc >= reference.width {
            return Err(Error::format(
                path,
                format!("line {lineno}: reference coordinate ({rr}, {rc}) outside {}x{}", reference.height, reference.width),
            ));
        }
        let pair = (pixel_index(hr, hc, cube.width), pixel_index(rr, rc, reference.width));
        if !seen.insert(pair) {
            return Err(Error::format(path, format!("line {lineno}: duplicate pair `{line}`")));
        }
        pairs.push(pair);
    }
    Correspondence::new(cube.pixels(), reference.pixels(), pairs).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_pairs(c: &Correspondence, path: impl AsRef<Path>, cube: GridShape, reference: GridShape) -> Result<()> {
    let path = path.as_ref();
    if cube.pixels() != c.n || reference.pixels() != c.m {
        return Err(Error::DimensionMismatch("grid shapes do not match the correspondence".into()));
    }
    let mut text = String::from("# hsi_row,hsi_col,ref_row,ref_col\n");
    for &(i, j) in &c.pairs {
        let (hr, hc) = pixel_coords(i, cube.width);
        let (rr, rc) = pixel_coords(j, reference.width);
        writeln!(text, "{hr},{hc},{rr},{rc}").expect("writing to a String");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// A keypoint match: `(x, y)` in the cube, `(x', y')` in the reference.
pub type PointMatch = ([f64; 2], [f64; 2]);

/// Reads `x,y,xp,yp` lines (decimal, sub-pixel allowed).
pub fn read_matches(path: impl AsRef<Path>) -> Result<Vec<PointMatch>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::format(path, format!("line {lineno}: expected four numbers, got `{line}`")))?;
        match cells[..] {
            [x, y, xp, yp] if cells.iter().all(|v| v.is_finite()) => out.push(([x, y], [xp, yp])),
            _ => return Err(Error::format(path, format!("line {lineno}: expected 4 finite fields"))),
        }
    }
    Ok(out)
}

pub fn write_matches(matches: &[PointMatch], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::from("# x,y,xp,yp\n");
    for ([x, y], [xp, yp]) in matches {
        writeln!(text, "{x},{y},{xp},{yp}").expect("writing to a String");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
