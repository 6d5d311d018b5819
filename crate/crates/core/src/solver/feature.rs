use nalgebra::DMatrix;

use super::{check_problem, matched_colors};
use super::SolveOptions;
use crate::correspondence::Correspondence;
use crate::error::{Error, Result};
use crate::graph::{laplacian_apply, SparseGraph};
use crate::hsi_io::{ColorImage, ProjectionMatrix, SpectralCube};

/// Cholesky pivots below this ratio (squared) are treated as singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFit {
    pub projection: ProjectionMatrix,
    pub lambda: f64,
}

/// Linear projection `F = (X ((1/lambda) L + C1) X')^-1 X C S'`.
///
/// Only the `p × p` system matrix is formed; the Laplacian is applied to `X`
/// matrix-free.
pub fn feature_level(
    cube: &SpectralCube,
    graph: &SparseGraph,
    corr: &Correspondence,
    s_lab: &ColorImage,
    opts: &SolveOptions,
) -> Result<FeatureFit> {
    opts.validate()?;
    let n = cube.pixels();
    check_problem(n, graph.n(), corr, s_lab)?;
    let lambda = opts.lambda.resolve(graph.k(), n, corr.len())?;
    let x = cube.data();
    let p = x.nrows();

    let xl = laplacian_apply(graph, x)?;
    let mut m = (&xl * x.transpose()) / lambda;
    let mut b = DMatrix::<f64>::zeros(p, 3);
    for (i, &r) in corr.row_sums().iter().enumerate() {
        if r > 0 {
            let xi = x.column(i);
            m.ger(r as f64, &xi, &xi, 1.0);
        }
    }
    for &(i, j) in corr.pairs() {
        b.ger(1.0, &x.column(i), &s_lab.data().column(j), 1.0);
    }
    for d in 0..p {
        m[(d, d)] += opts.ridge;
    }
    let m = (&m + m.transpose()) * 0.5;

    let singular = || {
        Error::Singular(format!(
            "the {p}x{p} feature-level system is not positive definite; pass a positive ridge"
        ))
    };
    let chol = m.cholesky().ok_or_else(singular)?;
    let pivots = chol.l_dirty().diagonal();
    let (lo, hi) = (pivots.min(), pivots.max());
    if !(lo * lo > SINGULAR_PIVOT_RATIO * hi * hi) {
        return Err(singular());
    }
    let f = chol.solve(&b);
    Ok(FeatureFit { projection: ProjectionMatrix::new(f)?, lambda })
}

/// `dG/dF = 2 X L X' F + 2 lambda X C1 X' F - 2 lambda X C S'`.
pub fn gradient_feature(
    f: &ProjectionMatrix,
    cube: &SpectralCube,
    graph: &SparseGraph,
    corr: &Correspondence,
    s_lab: &ColorImage,
    lambda: f64,
) -> Result<DMatrix<f64>> {
    check_problem(cube.pixels(), graph.n(), corr, s_lab)?;
    if f.source_bands() != cube.bands() {
        return Err(Error::DimensionMismatch("projection and cube band counts differ".into()));
    }
    let x = cube.data();
    let y = f.weights().tr_mul(x);
    // Y L and the constraint residual per pixel, then pulled back through X
    let mut per_pixel = laplacian_apply(graph, &y)?;
    let sc = matched_colors(corr, s_lab.data());
    for (i, &r) in corr.row_sums().iter().enumerate() {
        for c in 0..3 {
            per_pixel[(c, i)] += lambda * (r as f64 * y[(c, i)] - sc[(c, i)]);
        }
    }
    Ok((x * per_pixel.transpose()) * 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hsi_io::ColorSpace;
    use crate::solver::Lambda;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn opts(lambda: f64) -> SolveOptions {
        SolveOptions { lambda: Lambda::Fixed(lambda), ..Default::default() }
    }

    #[test]
    fn one_hot_spectra_map_to_their_colors() {
        let cube = SpectralCube::new(1, 3, DMatrix::identity(3, 3)).unwrap();
        let g = SparseGraph::from_edges(3, vec![]).unwrap();
        let corr = Correspondence::new(3, 3, vec![(0, 0), (1, 1), (2, 2)]).unwrap();
        let colors = DMatrix::from_row_slice(3, 3, &[0.1, 0.2, 0.3, -0.4, 0.5, 0.6, 0.7, -0.8, 0.9]);
        let s = ColorImage::new(ColorSpace::Lab, 1, 3, colors.clone()).unwrap();
        let fit = feature_level(&cube, &g, &corr, &s, &opts(1.0)).unwrap();
        let y = fit.projection.weights().tr_mul(cube.data());
        assert!((y - colors).abs().max() < 1e-14);
    }

    #[test]
    fn exactly_recovers_linear_model() {
        // X = [G S; noise rows], so F' X = S is attainable; no edges means nothing competes with it
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 30;
        let s_true = DMatrix::from_fn(3, n, |_, _| rng.random_range(-1.0..1.0));
        let g = DMatrix::from_fn(3, 3, |r, c| if r == c { 2.0 } else { rng.random_range(-0.5..0.5) });
        let extra = DMatrix::from_fn(3, n, |_, _| rng.random_range(0.0..1.0));
        let mut x = DMatrix::zeros(6, n);
        x.rows_mut(0, 3).copy_from(&(&g * &s_true));
        x.rows_mut(3, 3).copy_from(&extra);
        let cube = SpectralCube::new(5, 6, x).unwrap();
        let graph = SparseGraph::from_edges(n, vec![]).unwrap();
        let corr = Correspondence::new(n, n, (0..n).map(|i| (i, i)).collect()).unwrap();
        let s = ColorImage::new(ColorSpace::Lab, 5, 6, s_true.clone()).unwrap();
        let fit = feature_level(&cube, &graph, &corr, &s, &opts(3.0)).unwrap();
        let y = fit.projection.weights().tr_mul(cube.data());
        assert!((y - s_true).abs().max() < 1e-6);
    }

    #[test]
    fn singular_system_suggests_ridge() {
        // two identical bands make X X' rank-deficient
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        let cube = SpectralCube::new(1, 3, x).unwrap();
        let graph = SparseGraph::from_edges(3, vec![(0, 1, 1.0)]).unwrap();
        let corr = Correspondence::new(3, 3, vec![(0, 0), (2, 2)]).unwrap();
        let s = ColorImage::new(ColorSpace::Lab, 1, 3, DMatrix::from_element(3, 3, 0.2)).unwrap();
        let err = feature_level(&cube, &graph, &corr, &s, &opts(1.0)).unwrap_err();
        assert!(err.to_string().contains("ridge"), "{err}");
        let ridged = SolveOptions { ridge: 1e-6, ..opts(1.0) };
        assert!(feature_level(&cube, &graph, &corr, &s, &ridged).is_ok());
    }
}
