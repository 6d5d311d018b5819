//! Projective registration: normalized linear fit and RANSAC.
//!
//! Points are `(x, y)` = `(column, row)` in pixel units.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{sample_count, sample_indices, Correspondence, GridShape};
use crate::error::{Error, Result};
use crate::hsi_io::pixel_index;

/// A 3×3 projective transform normalized so that `H[2][2] = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography(Matrix3<f64>);

impl Homography {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Normalizes by the bottom-right entry; rejects non-finite or singular input.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let h22 = m[(2, 2)];
        if !h22.is_finite() || h22.abs() < 1e-300 {
            return Err(Error::DegenerateGeometry(format!("homography has H[2][2] = {h22}")));
        }
        let m = m / h22;
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("homography entries".into()));
        }
        if m.determinant().abs() <= 1e-12 {
            return Err(Error::DegenerateGeometry("homography is not invertible".into()));
        }
        Ok(Self(m))
    }

    pub fn from_row_slice(values: &[f64; 9]) -> Result<Self> {
        Self::new(Matrix3::from_row_slice(values))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Maps a point; `None` when it lands on the line at infinity.
    pub fn apply(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        let v = self.0 * Vector3::new(p[0], p[1], 1.0);
        if v[2].abs() < 1e-12 {
            return None;
        }
        let out = [v[0] / v[2], v[1] / v[2]];
        out.iter().all(|c| c.is_finite()).then_some(out)
    }

    /// Euclidean distance between `H(src)` and `dst`; infinite when unmappable.
    pub fn reprojection_error(&self, src: [f64; 2], dst: [f64; 2]) -> f64 {
        match self.apply(src) {
            Some([x, y]) => ((x - dst[0]).powi(2) + (y - dst[1]).powi(2)).sqrt(),
            None => f64::INFINITY,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .0
            .try_inverse()
            .ok_or_else(|| Error::DegenerateGeometry("homography is not invertible".into()))?;
        Self::new(inv)
    }
}

/// Writes three lines of three full-precision values, row-major.
pub fn write_homography(h: &Homography, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    for r in 0..3 {
        let row: Vec<String> = (0..3).map(|c| format!("{:.16e}", h.0[(r, c)])).collect();
        writeln!(text, "{}", row.join(" ")).expect("writing to a String");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_homography(path: impl AsRef<Path>) -> Result<Homography> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let values: Vec<f64> = text
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::format(path, "homography must hold 9 numbers"))?;
    let values: [f64; 9] = values
        .try_into()
        .map_err(|v: Vec<f64>| Error::format(path, format!("homography must hold 9 numbers, found {}", v.len())))?;
    Homography::from_row_slice(&values).map_err(|e| Error::format(path, e.to_string()))
}

/// Similarity taking the centroid to the origin and the RMS radius to √2.
fn normalizing_transform(points: &[[f64; 2]]) -> Result<Matrix3<f64>> {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let rms = (points.iter().map(|p| (p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sum::<f64>() / n).sqrt();
    if !(rms > 0.0) || !rms.is_finite() {
        return Err(Error::DegenerateGeometry("all points coincide".into()));
    }
    let s = std::f64::consts::SQRT_2 / rms;
    Ok(Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0))
}

fn transform(t: &Matrix3<f64>, p: [f64; 2]) -> [f64; 2] {
    [t[(0, 0)] * p[0] + t[(0, 2)], t[(1, 1)] * p[1] + t[(1, 2)]]
}

/// Least-squares projective fit with `h9 = 1`.
///
/// Each pair contributes the two equations obtained by multiplying the
/// projective map through by its denominator, solved for `h1..h8` in
/// Hartley-normalized coordinates and mapped back afterwards.
pub fn fit_homography(src: &[[f64; 2]], dst: &[[f64; 2]]) -> Result<Homography> {
    if src.len() != dst.len() {
        return Err(Error::DimensionMismatch(format!("{} source points, {} targets", src.len(), dst.len())));
    }
    if src.len() < 4 {
        return Err(Error::InsufficientPairs { needed: 4, got: src.len() });
    }
    if src.iter().chain(dst).flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("point coordinates".into()));
    }
    let t_src = normalizing_transform(src)?;
    let t_dst = normalizing_transform(dst)?;

    let rows = 2 * src.len();
    let mut a = DMatrix::<f64>::zeros(rows, 8);
    let mut b = DVector::<f64>::zeros(rows);
    for (k, (&s, &d)) in src.iter().zip(dst).enumerate() {
        let [x, y] = transform(&t_src, s);
        let [u, v] = transform(&t_dst, d);
        let r = 2 * k;
        a.row_mut(r).copy_from_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -x * u, -y * u]);
        b[r] = u;
        a.row_mut(r + 1).copy_from_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -x * v, -y * v]);
        b[r + 1] = v;
    }

    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(Error::DegenerateGeometry(format!(
            "rank-deficient fit (singular values {smin:e} / {smax:e}); points may be collinear"
        )));
    }
    let h = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::DegenerateGeometry(format!("least-squares solve failed: {e}")))?;
    let normalized = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0);
    let t_dst_inv = t_dst
        .try_inverse()
        .ok_or_else(|| Error::DegenerateGeometry("normalization not invertible".into()))?;
    Homography::new(t_dst_inv * normalized * t_src)
}

/// Result of [`ransac_homography`].
#[derive(Debug, Clone, PartialEq)]
pub struct RansacFit {
    pub homography: Homography,
    /// `true` for pairs whose reprojection error under `homography` is below the threshold.
    pub inliers: Vec<bool>,
}

impl RansacFit {
    pub fn inlier_count(&self) -> usize {
        self.inliers.iter().filter(|&&b| b).count()
    }
}

fn inlier_mask(h: &Homography, src: &[[f64; 2]], dst: &[[f64; 2]], threshold: f64) -> Vec<bool> {
    src.par_iter().zip(dst).map(|(&s, &d)| h.reprojection_error(s, d) < threshold).collect()
}

/// Hypothesize-and-verify over seeded 4-point samples, then refit on the best
/// consensus set. The returned mask is evaluated under the refit transform.
pub fn ransac_homography(
    src: &[[f64; 2]],
    dst: &[[f64; 2]],
    inlier_px: f64,
    iters: usize,
    seed: u64,
) -> Result<RansacFit> {
    if src.len() != dst.len() {
        return Err(Error::DimensionMismatch(format!("{} source points, {} targets", src.len(), dst.len())));
    }
    if src.len() < 4 {
        return Err(Error::InsufficientPairs { needed: 4, got: src.len() });
    }
    if !(inlier_px > 0.0) {
        return Err(Error::InvalidArgument(format!("inlier threshold must be positive, got {inlier_px}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Homography, Vec<bool>)> = None;
    for _ in 0..iters {
        let sample = rand::seq::index::sample(&mut rng, src.len(), 4);
        let s: Vec<[f64; 2]> = sample.iter().map(|k| src[k]).collect();
        let d: Vec<[f64; 2]> = sample.iter().map(|k| dst[k]).collect();
        let Ok(h) = fit_homography(&s, &d) else { continue };
        let mask = inlier_mask(&h, src, dst, inlier_px);
        let count = mask.iter().filter(|&&b| b).count();
        if best.as_ref().is_none_or(|(c, _, _)| count > *c) {
            best = Some((count, h, mask));
        }
    }

    let best_count = best.as_ref().map_or(0, |(c, _, _)| *c);
    let Some((_, hypothesis, mask)) = best.filter(|(c, _, _)| *c >= 4) else {
        return Err(Error::NoConsensus { best: best_count });
    };
    let (s, d): (Vec<_>, Vec<_>) = src.iter().zip(dst).zip(&mask).filter(|(_, &m)| m).map(|((a, b), _)| (*a, *b)).unzip();
    match fit_homography(&s, &d) {
        Ok(refit) => {
            let inliers = inlier_mask(&refit, src, dst, inlier_px);
            Ok(RansacFit { homography: refit, inliers })
        }
        Err(_) => Ok(RansacFit { homography: hypothesis, inliers: mask }),
    }
}

/// Maps `ceil(fraction * n)` seeded cube pixels through `h` and pairs each with
/// the nearest reference pixel. Pixels landing outside the reference are dropped.
pub fn pairs_from_homography(
    h: &Homography,
    cube: GridShape,
    reference: GridShape,
    fraction: f64,
    seed: u64,
) -> Result<Correspondence> {
    let n = cube.pixels();
    let count = sample_count(fraction, n)?;
    let mut pairs = Vec::with_capacity(count);
    for i in sample_indices(n, count, seed) {
        let (row, col) = (i / cube.width, i % cube.width);
        let Some([x, y]) = h.apply([col as f64, row as f64]) else { continue };
        // f64::round rounds half away from zero
        let (rc, rr) = (x.round(), y.round());
        if rc < 0.0 || rr < 0.0 || rc >= reference.width as f64 || rr >= reference.height as f64 {
            continue;
        }
        pairs.push((i, pixel_index(rr as usize, rc as usize, reference.width)));
    }
    if pairs.is_empty() {
        return Err(Error::AllOutside);
    }
    Correspondence::new(n, reference.pixels(), pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::sample_aligned;
    use rand::Rng;

    fn map_all(h: &Matrix3<f64>, pts: &[[f64; 2]]) -> Vec<[f64; 2]> {
        pts.iter()
            .map(|p| {
                let v = h * Vector3::new(p[0], p[1], 1.0);
                [v[0] / v[2], v[1] / v[2]]
            })
            .collect()
    }

    fn random_points(rng: &mut ChaCha8Rng, count: usize, extent: f64) -> Vec<[f64; 2]> {
        (0..count).map(|_| [rng.random_range(0.0..extent), rng.random_range(0.0..extent)]).collect()
    }

    fn max_abs_diff(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
        (a - b).abs().max()
    }

    #[test]
    fn unit_square_identity() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let h = fit_homography(&sq, &sq).unwrap();
        assert!(max_abs_diff(h.matrix(), &Matrix3::identity()) < 1e-10);
    }

    #[test]
    fn recovers_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let src = random_points(&mut rng, 10, 50.0);
        let dst: Vec<_> = src.iter().map(|p| [p[0] + 3.0, p[1] - 2.0]).collect();
        let h = fit_homography(&src, &dst).unwrap();
        let truth = Matrix3::new(1.0, 0.0, 3.0, 0.0, 1.0, -2.0, 0.0, 0.0, 1.0);
        assert!(max_abs_diff(h.matrix(), &truth) < 1e-8);
    }

    #[test]
    fn recovers_random_projective() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let truth = Matrix3::new(
            1.1, 0.05, 4.0, -0.08, 0.95, -3.0, rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3), 1.0,
        );
        let src = random_points(&mut rng, 20, 100.0);
        let dst = map_all(&truth, &src);
        let h = fit_homography(&src, &dst).unwrap();
        assert!(max_abs_diff(h.matrix(), &truth) < 1e-6);
        for (s, d) in src.iter().zip(&dst) {
            assert!(h.reprojection_error(*s, *d) < 1e-8);
        }
    }

    #[test]
    fn rejects_too_few_and_collinear() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 1.0]];
        assert!(matches!(fit_homography(&pts, &pts), Err(Error::InsufficientPairs { got: 3, .. })));
        let line = [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]];
        assert!(matches!(fit_homography(&line, &line), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn ransac_needs_four() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 1.0]];
        assert!(ransac_homography(&pts, &pts, 1.0, 10, 0).is_err());
    }

    #[test]
    fn ransac_exact_data_all_inliers_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let truth = Matrix3::new(0.9, -0.1, 10.0, 0.12, 1.05, 2.0, 2e-4, -3e-4, 1.0);
        let src = random_points(&mut rng, 30, 80.0);
        let dst = map_all(&truth, &src);
        let fit = ransac_homography(&src, &dst, 0.5, 50, 9).unwrap();
        assert_eq!(fit.inlier_count(), 30);
        assert!(max_abs_diff(fit.homography.matrix(), &truth) < 1e-6);
        assert_eq!(fit, ransac_homography(&src, &dst, 0.5, 50, 9).unwrap());
    }

    #[test]
    fn identity_pairs_match_aligned_sampling() {
        let shape = GridShape::new(4, 5);
        let c = pairs_from_homography(&Homography::identity(), shape, shape, 1.0, 0).unwrap();
        assert_eq!(c, sample_aligned(20, 1.0, 0).unwrap());
    }

    #[test]
    fn translation_out_of_frame_errors() {
        let shape = GridShape::new(4, 5);
        let h = Homography::from_row_slice(&[1.0, 0.0, 5.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(pairs_from_homography(&h, shape, shape, 1.0, 0), Err(Error::AllOutside)));
    }

    #[test]
    fn half_coverage_affine() {
        // shift right by half the width: exactly the left half of the cube lands inside
        let shape = GridShape::new(20, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let shear = rng.random_range(-0.01..0.01);
        let h = Homography::from_row_slice(&[1.0, shear, 10.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let n = shape.pixels();
        // coverage oracle: map every pixel exhaustively
        let inside = (0..n)
            .filter(|&i| {
                let [x, y] = h.apply([(i % 20) as f64, (i / 20) as f64]).unwrap();
                let (x, y) = (x.round(), y.round());
                (0.0..20.0).contains(&x) && (0.0..20.0).contains(&y)
            })
            .count();
        let c = pairs_from_homography(&h, shape, shape, 1.0, 3).unwrap();
        assert_eq!(c.len(), inside);
        assert!(c.len() as f64 >= 0.4 * n as f64 && c.len() as f64 <= 0.6 * n as f64);
        assert!(c.pairs().iter().all(|&(_, j)| j < n));
    }

    #[test]
    fn homography_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.txt");
        let h = Homography::from_row_slice(&[1.1, 0.2, -3.0, 0.01, 0.9, 4.5, 1e-4, -2e-4, 1.0]).unwrap();
        write_homography(&h, &p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap().lines().count(), 3);
        assert_eq!(read_homography(&p).unwrap(), h);
        fs::write(&p, "1 0 0\n0 1 0\n").unwrap();
        assert!(read_homography(&p).is_err());
    }

    #[test]
    fn inverse_fit_composes_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let truth = Matrix3::new(1.2, 0.1, -5.0, -0.05, 0.8, 7.0, 5e-4, 2e-4, 1.0);
        let src = random_points(&mut rng, 12, 60.0);
        let dst = map_all(&truth, &src);
        let fwd = fit_homography(&src, &dst).unwrap();
        let back = fit_homography(&dst, &src).unwrap();
        let prod = fwd.matrix() * back.matrix();
        let prod = prod / prod[(2, 2)];
        assert!(max_abs_diff(&prod, &Matrix3::identity()) < 1e-6);
    }
}
