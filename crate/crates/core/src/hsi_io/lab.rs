//! RGB ↔ Lαβ (log-LMS followed by an orthogonal decorrelating transform).

use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix3, Vector3};

use super::{ColorImage, ColorSpace};
use crate::error::Result;

/// Channel floor applied before the logarithm.
pub const LOG_FLOOR: f64 = 1e-4;

#[rustfmt::skip]
fn rgb_to_lms() -> Matrix3<f64> {
    Matrix3::new(
        0.3811, 0.5783, 0.0402,
        0.1967, 0.7244, 0.0782,
        0.0241, 0.1288, 0.8444,
    )
}

#[rustfmt::skip]
fn log_lms_to_lab() -> Matrix3<f64> {
    let scale = Matrix3::from_diagonal(&Vector3::new(
        1.0 / 3f64.sqrt(),
        1.0 / 6f64.sqrt(),
        1.0 / 2f64.sqrt(),
    ));
    scale * Matrix3::new(
        1.0,  1.0,  1.0,
        1.0,  1.0, -2.0,
        1.0, -1.0,  0.0,
    )
}

struct Inverses {
    lms_to_rgb: Matrix3<f64>,
    lab_to_log_lms: Matrix3<f64>,
}

fn inverses() -> &'static Inverses {
    static INV: OnceLock<Inverses> = OnceLock::new();
    INV.get_or_init(|| Inverses {
        lms_to_rgb: rgb_to_lms().try_inverse().expect("RGB->LMS matrix is invertible"),
        lab_to_log_lms: log_lms_to_lab().try_inverse().expect("logLMS->Lab matrix is invertible"),
    })
}

pub fn rgb_to_lab(image: &ColorImage) -> Result<ColorImage> {
    image.expect_space(ColorSpace::Rgb)?;
    let to_lms = rgb_to_lms();
    let to_lab = log_lms_to_lab();
    let mut out = DMatrix::zeros(3, image.pixels());
    for (src, mut dst) in image.data().column_iter().zip(out.column_iter_mut()) {
        let rgb = Vector3::new(src[0], src[1], src[2]).map(|c| c.max(LOG_FLOOR));
        let log_lms = (to_lms * rgb).map(f64::log10);
        dst.copy_from(&(to_lab * log_lms));
    }
    ColorImage::new(ColorSpace::Lab, image.height(), image.width(), out)
}

/// Exact algebraic inverse of [`rgb_to_lab`] followed by clipping to `[0, 1]`.
pub fn lab_to_rgb(image: &ColorImage) -> Result<ColorImage> {
    image.expect_space(ColorSpace::Lab)?;
    let inv = inverses();
    let mut out = DMatrix::zeros(3, image.pixels());
    for (src, mut dst) in image.data().column_iter().zip(out.column_iter_mut()) {
        let lab = Vector3::new(src[0], src[1], src[2]);
        let lms = (inv.lab_to_log_lms * lab).map(|v| 10f64.powf(v));
        let rgb = (inv.lms_to_rgb * lms).map(|c| if c.is_nan() { 0.0 } else { c.clamp(0.0, 1.0) });
        dst.copy_from(&rgb);
    }
    ColorImage::new(ColorSpace::Rgb, image.height(), image.width(), out)
}
