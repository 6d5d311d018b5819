//! Closed-form constrained manifold learning.
//!
//! Both solvers minimize a graph-smoothness term `tr(Y L Y')` plus `lambda`
//! times the squared distance between each constrained pixel and its matched
//! reference color. [`instance_level`] optimizes the `3 × n` colors `Y`
//! directly; [`feature_level`] restricts `Y = F' X` to a linear map of the
//! spectra and solves for `F`.

mod cg;
mod feature;
mod instance;
mod lpp;
mod objective;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::correspondence::Correspondence;
use crate::error::{Error, Result};
use crate::hsi_io::{ColorImage, ColorSpace, ProjectionMatrix, SpectralCube};

pub use cg::{cg_solve, CgOutcome};
pub use feature::{feature_level, gradient_feature, FeatureFit};
pub use instance::{gradient_instance, instance_level};
pub use lpp::{lpp_baseline, LppProjection};
pub use objective::{objective_feature, objective_instance};

/// Weight of the color constraint.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Lambda {
    /// `k * n / c` with `k` neighbors, `n` pixels and `c` constraint pairs.
    #[default]
    Auto,
    Fixed(f64),
}

impl Lambda {
    /// The auto rule multiplies in integers and divides once in floating point.
    pub fn resolve(&self, k: Option<usize>, n: usize, pairs: usize) -> Result<f64> {
        match *self {
            Lambda::Fixed(v) if v > 0.0 && v.is_finite() => Ok(v),
            Lambda::Fixed(v) => Err(Error::InvalidArgument(format!("lambda must be positive, got {v}"))),
            Lambda::Auto => {
                let k = k.ok_or_else(|| {
                    Error::InvalidArgument("automatic lambda needs the graph's neighbor count".into())
                })?;
                if pairs == 0 {
                    return Err(Error::InvalidArgument("automatic lambda needs at least one pair".into()));
                }
                Ok((k * n) as f64 / pairs as f64)
            }
        }
    }
}

impl FromStr for Lambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Lambda::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Lambda::Fixed(v)),
            _ => Err(Error::InvalidArgument(format!("lambda must be a positive number or `auto`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub lambda: Lambda,
    /// Relative residual target for each CG solve.
    pub cg_tol: f64,
    /// `None` uses `max(10 * sqrt(n), 200)`.
    pub cg_max_iter: Option<usize>,
    /// Tikhonov term added to the system matrix; 0 disables it.
    pub ridge: f64,
    /// Jacobi-precondition the CG solves.
    pub jacobi: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { lambda: Lambda::Auto, cg_tol: 1e-8, cg_max_iter: None, ridge: 0.0, jacobi: false }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if let Lambda::Fixed(v) = self.lambda {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("lambda must be positive, got {v}")));
            }
        }
        if !(self.cg_tol > 0.0) || !self.cg_tol.is_finite() {
            return Err(Error::InvalidArgument(format!("cg tolerance must be positive, got {}", self.cg_tol)));
        }
        if !(self.ridge >= 0.0) || !self.ridge.is_finite() {
            return Err(Error::InvalidArgument(format!("ridge must be non-negative, got {}", self.ridge)));
        }
        if self.cg_max_iter == Some(0) {
            return Err(Error::InvalidArgument("cg iteration cap must be positive".into()));
        }
        Ok(())
    }

    pub fn max_iter_for(&self, n: usize) -> usize {
        self.cg_max_iter.unwrap_or_else(|| ((10.0 * (n as f64).sqrt()).ceil() as usize).max(200))
    }
}

/// Colors in the Lαβ working space plus per-channel solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    /// `3 × n`, one column per cube pixel.
    pub y: DMatrix<f64>,
    pub lambda: Option<f64>,
    pub iterations: Vec<usize>,
    pub residuals: Vec<f64>,
    /// `false` for any channel whose CG hit the iteration cap.
    pub converged: Vec<bool>,
}

impl EmbeddingResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    /// Wraps `y` as a Lab image on the cube's grid.
    pub fn to_image(&self, height: usize, width: usize) -> Result<ColorImage> {
        ColorImage::new(ColorSpace::Lab, height, width, self.y.clone())
    }

    /// `lambda=<v> iters=<a>,<b>,<c> res=<ra>,<rb>,<rc>`
    pub fn diagnostics(&self) -> String {
        Diagnostics { lambda: self.lambda, iterations: &self.iterations, residuals: &self.residuals }.to_string()
    }
}

pub(crate) struct Diagnostics<'a> {
    pub lambda: Option<f64>,
    pub iterations: &'a [usize],
    pub residuals: &'a [f64],
}

impl fmt::Display for Diagnostics<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        match self.lambda {
            Some(l) => write!(f, "lambda={l}")?,
            None => f.write_str("lambda=none")?,
        }
        write!(
            f,
            " iters={} res={}",
            join(self.iterations.iter().map(|v| v.to_string()).collect()),
            join(self.residuals.iter().map(|v| format!("{v:e}")).collect())
        )
    }
}

/// Formats the diagnostics line for a closed-form (non-iterative) solve.
pub fn direct_diagnostics(lambda: f64) -> String {
    Diagnostics { lambda: Some(lambda), iterations: &[], residuals: &[] }.to_string()
}

/// `Y = F' X`.
pub fn apply_projection(projection: &ProjectionMatrix, cube: &SpectralCube) -> Result<EmbeddingResult> {
    if projection.source_bands() != cube.bands() {
        return Err(Error::DimensionMismatch(format!(
            "projection expects {} bands, cube has {}",
            projection.source_bands(),
            cube.bands()
        )));
    }
    Ok(EmbeddingResult {
        y: projection.weights().tr_mul(cube.data()),
        lambda: None,
        iterations: Vec::new(),
        residuals: Vec::new(),
        converged: Vec::new(),
    })
}

/// Shared shape checks for the constrained solvers.
pub(crate) fn check_problem(
    n: usize,
    graph_n: usize,
    corr: &Correspondence,
    s_lab: &ColorImage,
) -> Result<()> {
    s_lab.expect_space(ColorSpace::Lab)?;
    if graph_n != n || corr.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "graph has {graph_n} nodes, correspondence {} cube pixels, expected {n}",
            corr.n()
        )));
    }
    if corr.m() != s_lab.pixels() {
        return Err(Error::DimensionMismatch(format!(
            "correspondence expects {} reference pixels, image has {}",
            corr.m(),
            s_lab.pixels()
        )));
    }
    Ok(())
}

/// `S C'`: column `i` is the sum of the reference colors matched to pixel `i`.
pub(crate) fn matched_colors(corr: &Correspondence, s: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(s.nrows(), corr.n());
    for &(i, j) in corr.pairs() {
        let mut col = out.column_mut(i);
        col += s.column(j);
    }
    out
}
