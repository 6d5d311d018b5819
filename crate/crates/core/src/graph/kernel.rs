use super::KernelParams;
use crate::error::{Error, Result};

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Gaussian RBF `exp(-|x - y|^2 / (2 delta^2))`.
///
/// The heat kernel `exp(-|x - y|^2 / t)` is the same function with `t = 2 delta^2`.
pub fn rbf_kernel(x: &[f64], y: &[f64], delta: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!("vectors of length {} and {}", x.len(), y.len())));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {delta}")));
    }
    Ok(rbf_unchecked(x, y, delta))
}

#[inline]
pub(crate) fn rbf_unchecked(x: &[f64], y: &[f64], delta: f64) -> f64 {
    (-squared_distance(x, y) / (2.0 * delta * delta)).exp()
}

/// Weighted sum of a spectral and a spatial RBF: `mu * K_s + (1 - mu) * K_w`.
pub fn composite_kernel(
    spectral_i: &[f64],
    spectral_j: &[f64],
    spatial_i: &[f64],
    spatial_j: &[f64],
    params: &KernelParams,
) -> Result<f64> {
    params.validate()?;
    if spectral_i.len() != spectral_j.len() || spatial_i.len() != spatial_j.len() {
        return Err(Error::DimensionMismatch("composite kernel feature lengths differ".into()));
    }
    Ok(composite_unchecked(spectral_i, spectral_j, spatial_i, spatial_j, params))
}

#[inline]
pub(crate) fn composite_unchecked(
    spectral_i: &[f64],
    spectral_j: &[f64],
    spatial_i: &[f64],
    spatial_j: &[f64],
    params: &KernelParams,
) -> f64 {
    let ks = rbf_unchecked(spectral_i, spectral_j, params.delta_s);
    let kw = rbf_unchecked(spatial_i, spatial_j, params.delta_w);
    params.mu * ks + (1.0 - params.mu) * kw
}
