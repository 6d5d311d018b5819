use nalgebra::DMatrix;
use rayon::prelude::*;

use super::cg::cg_solve;
use super::{check_problem, matched_colors, EmbeddingResult, SolveOptions};
use crate::correspondence::Correspondence;
use crate::error::{Error, Result};
use crate::graph::{laplacian_apply, laplacian_apply_vec, SparseGraph};
use crate::hsi_io::ColorImage;

/// Smallest node of the first graph component without a constrained pixel.
pub(crate) fn unconstrained_witness(graph: &SparseGraph, corr: &Correspondence) -> Option<usize> {
    let labels = graph.components();
    let mut covered = vec![false; graph.n()];
    for (i, &rows) in corr.row_sums().iter().enumerate() {
        if rows > 0 {
            covered[labels[i]] = true;
        }
    }
    (0..graph.n()).find(|&v| labels[v] == v && !covered[v])
}

/// Colors for every cube pixel: `Y = S C' ((1/lambda) L + C1)^-1`.
///
/// Each Lαβ channel is solved independently by conjugate gradient on
/// `A = (1/lambda) L + C1 + ridge I` with a matrix-free Laplacian. Channels
/// that hit the iteration cap are flagged in the result rather than failing.
pub fn instance_level(
    graph: &SparseGraph,
    corr: &Correspondence,
    s_lab: &ColorImage,
    opts: &SolveOptions,
) -> Result<EmbeddingResult> {
    opts.validate()?;
    let n = graph.n();
    check_problem(n, n, corr, s_lab)?;
    if opts.ridge == 0.0 {
        if let Some(witness) = unconstrained_witness(graph, corr) {
            return Err(Error::UnconstrainedComponent { witness });
        }
    }
    let lambda = opts.lambda.resolve(graph.k(), n, corr.len())?;
    let inv_lambda = 1.0 / lambda;
    let c1: Vec<f64> = corr.row_sums().iter().map(|&r| r as f64).collect();
    let rhs = matched_colors(corr, s_lab.data());
    let max_iter = opts.max_iter_for(n);
    let ridge = opts.ridge;

    let diagonal: Option<Vec<f64>> = opts
        .jacobi
        .then(|| (0..n).map(|i| inv_lambda * graph.degree()[i] + c1[i] + ridge).collect());

    let apply_a = |x: &[f64], out: &mut [f64]| {
        laplacian_apply_vec(graph, x, out);
        out.iter_mut().zip(x).zip(&c1).for_each(|((o, &x), &c)| *o = inv_lambda * *o + (c + ridge) * x);
    };

    let outcomes = (0..3)
        .into_par_iter()
        .map(|c| {
            let b: Vec<f64> = rhs.row(c).iter().copied().collect();
            cg_solve(apply_a, &b, opts.cg_tol, max_iter, diagonal.as_deref())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut y = DMatrix::zeros(3, n);
    for (c, out) in outcomes.iter().enumerate() {
        for (i, &v) in out.x.iter().enumerate() {
            y[(c, i)] = v;
        }
    }
    Ok(EmbeddingResult {
        y,
        lambda: Some(lambda),
        iterations: outcomes.iter().map(|o| o.iterations).collect(),
        residuals: outcomes.iter().map(|o| o.residual).collect(),
        converged: outcomes.iter().map(|o| o.converged).collect(),
    })
}

/// `dH/dY = 2 Y L + 2 lambda Y C1 - 2 lambda S C'`.
pub fn gradient_instance(
    y: &DMatrix<f64>,
    graph: &SparseGraph,
    corr: &Correspondence,
    s_lab: &ColorImage,
    lambda: f64,
) -> Result<DMatrix<f64>> {
    check_problem(y.ncols(), graph.n(), corr, s_lab)?;
    let mut grad = laplacian_apply(graph, y)? * 2.0;
    let sc = matched_colors(corr, s_lab.data());
    for (i, &r) in corr.row_sums().iter().enumerate() {
        for c in 0..y.nrows() {
            grad[(c, i)] += 2.0 * lambda * (r as f64 * y[(c, i)] - sc[(c, i)]);
        }
    }
    Ok(grad)
}
