use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hsi_io::SpectralCube;

/// Per-band Gaussian-weighted window average.
///
/// Taps that fall outside the image are dropped and the remaining weights
/// renormalized to sum to one, so no padding value is ever invented.
pub fn spatial_features(cube: &SpectralCube, radius: usize, sigma: f64) -> Result<SpectralCube> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("spatial sigma must be positive, got {sigma}")));
    }
    if radius == 0 {
        return Ok(cube.clone());
    }
    let (h, w, p) = (cube.height(), cube.width(), cube.bands());
    let r = radius as isize;
    let taps: Vec<(isize, isize, f64)> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dy, dx)))
        .map(|(dy, dx)| (dy, dx, (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp()))
        .collect();

    let src = cube.data();
    let mut out = DMatrix::<f64>::zeros(p, h * w);
    out.as_mut_slice().par_chunks_mut(p).enumerate().for_each(|(i, dst)| {
        let (row, col) = ((i / w) as isize, (i % w) as isize);
        let mut total = 0.0;
        for &(dy, dx, weight) in &taps {
            let (y, x) = (row + dy, col + dx);
            if y < 0 || x < 0 || y >= h as isize || x >= w as isize {
                continue;
            }
            let j = y as usize * w + x as usize;
            total += weight;
            for (acc, &v) in dst.iter_mut().zip(src.column(j).iter()) {
                *acc += weight * v;
            }
        }
        for acc in dst.iter_mut() {
            *acc /= total;
        }
    });
    SpectralCube::new(h, w, out)
}
