use nalgebra::DMatrix;

use super::check_problem;
use crate::correspondence::Correspondence;
use crate::error::{Error, Result};
use crate::graph::{laplacian_apply, SparseGraph};
use crate::hsi_io::{ColorImage, ProjectionMatrix, SpectralCube};

/// `tr(Y L Y') + lambda tr(Y C1 Y' + S C2 S' - 2 Y C S')`, constant term included.
pub fn objective_instance(
    y: &DMatrix<f64>,
    graph: &SparseGraph,
    corr: &Correspondence,
    s_lab: &ColorImage,
    lambda: f64,
) -> Result<f64> {
    check_problem(y.ncols(), graph.n(), corr, s_lab)?;
    if y.nrows() != 3 {
        return Err(Error::DimensionMismatch(format!("Y must have 3 rows, got {}", y.nrows())));
    }
    let s = s_lab.data();
    let smooth = y.dot(&laplacian_apply(graph, y)?);
    let yc1y: f64 = corr
        .row_sums()
        .iter()
        .enumerate()
        .map(|(i, &r)| r as f64 * y.column(i).norm_squared())
        .sum();
    let sc2s: f64 = corr
        .col_sums()
        .iter()
        .enumerate()
        .map(|(j, &c)| c as f64 * s.column(j).norm_squared())
        .sum();
    let ycs: f64 = corr.pairs().iter().map(|&(i, j)| y.column(i).dot(&s.column(j))).sum();
    Ok(smooth + lambda * (yc1y + sc2s - 2.0 * ycs))
}

/// [`objective_instance`] evaluated at `Y = F' X`.
pub fn objective_feature(
    f: &ProjectionMatrix,
    cube: &SpectralCube,
    graph: &SparseGraph,
    corr: &Correspondence,
    s_lab: &ColorImage,
    lambda: f64,
) -> Result<f64> {
    if f.source_bands() != cube.bands() {
        return Err(Error::DimensionMismatch("projection and cube band counts differ".into()));
    }
    objective_instance(&f.weights().tr_mul(cube.data()), graph, corr, s_lab, lambda)
}
