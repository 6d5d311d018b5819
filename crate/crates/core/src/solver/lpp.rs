use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{laplacian_apply, SparseGraph};
use crate::hsi_io::{ProjectionMatrix, SpectralCube};

/// Unconstrained locality preserving projection, used for comparison renders.
#[derive(Debug, Clone, PartialEq)]
pub struct LppProjection {
    pub projection: ProjectionMatrix,
    /// Generalized eigenvalues of the returned columns, ascending.
    pub eigenvalues: [f64; 3],
}

/// Three smallest generalized eigenvectors of `(X L X', X D X')`.
///
/// The pencil is reduced to a standard symmetric problem with the Cholesky
/// factor of `X D X'`. Columns have unit `X D X'`-norm and their
/// largest-magnitude entry is positive.
pub fn lpp_baseline(cube: &SpectralCube, graph: &SparseGraph) -> Result<LppProjection> {
    let p = cube.bands();
    if p < 3 {
        return Err(Error::InvalidArgument(format!("LPP needs at least 3 bands, got {p}")));
    }
    if graph.n() != cube.pixels() {
        return Err(Error::DimensionMismatch(format!("graph has {} nodes, cube {} pixels", graph.n(), cube.pixels())));
    }
    let x = cube.data();
    let a = &laplacian_apply(graph, x)? * x.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let mut xd = x.clone();
    for (mut col, &d) in xd.column_iter_mut().zip(graph.degree()) {
        col *= d;
    }
    let b = &xd * x.transpose();
    let mut b = (&b + b.transpose()) * 0.5;

    let chol = match b.clone().cholesky() {
        Some(c) => c,
        None => {
            let ridge = 1e-10 * b.trace() / p as f64;
            for d in 0..p {
                b[(d, d)] += ridge;
            }
            b.clone()
                .cholesky()
                .ok_or_else(|| Error::Singular("X D X' is not positive definite even after ridge".into()))?
        }
    };
    let g = chol.l();
    // C = G^-1 A G^-T
    let ginv_a = g
        .solve_lower_triangular(&a)
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let c = g
        .solve_lower_triangular(&ginv_a.transpose())
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let c = (&c + c.transpose()) * 0.5;

    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut f = DMatrix::zeros(p, 3);
    let mut eigenvalues = [0.0; 3];
    let gt = g.transpose();
    for (col, &k) in order.iter().take(3).enumerate() {
        let v = eig.eigenvectors.column(k).into_owned();
        let mut w = gt
            .solve_upper_triangular(&v)
            .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
        let norm = (w.transpose() * &b * &w)[(0, 0)].sqrt();
        w /= norm;
        let lead = w.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if lead < 0.0 {
            w = -w;
        }
        f.set_column(col, &w);
        eigenvalues[col] = eig.eigenvalues[k];
    }
    Ok(LppProjection { projection: ProjectionMatrix::new(f)?, eigenvalues })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn needs_three_bands() {
        let cube = SpectralCube::new(1, 3, DMatrix::from_element(2, 3, 1.0)).unwrap();
        let g = SparseGraph::from_edges(3, vec![(0, 1, 1.0)]).unwrap();
        assert!(lpp_baseline(&cube, &g).is_err());
    }
}
