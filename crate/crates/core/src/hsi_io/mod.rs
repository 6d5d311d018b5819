//! Cube, image and projection containers plus their file formats.
//!
//! Pixels are addressed by a flat row-major index `i = row * width + col`
//! in every container, so a cube column and an image column with the same
//! index refer to the same grid position.

mod envi;
mod lab;
mod ppm;
mod projection;

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use envi::{raw_path_for, read_cube, write_cube};
pub use lab::{lab_to_rgb, rgb_to_lab, LOG_FLOOR};
pub use ppm::{read_image, write_image};
pub use projection::{read_projection, write_projection};

/// Flat row-major index of a grid position.
#[inline]
pub fn pixel_index(row: usize, col: usize, width: usize) -> usize {
    row * width + col
}

/// Inverse of [`pixel_index`]: `(row, col)` of a flat index.
#[inline]
pub fn pixel_coords(index: usize, width: usize) -> (usize, usize) {
    (index / width, index % width)
}

/// A hyperspectral cube: `bands × pixels` reflectance values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCube {
    height: usize,
    width: usize,
    data: DMatrix<f64>,
    band_wavelengths: Option<Vec<f64>>,
}

impl SpectralCube {
    /// `data` holds one column per pixel (row-major grid order) and one row per band.
    pub fn new(height: usize, width: usize, data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(Error::InvalidArgument("cube must have at least one band".into()));
        }
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument(format!(
                "cube grid must be non-empty, got {height}x{width}"
            )));
        }
        if data.ncols() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{} pixel columns for a {height}x{width} grid",
                data.ncols()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            let (band, pixel) = (pos % data.nrows(), pos / data.nrows());
            return Err(Error::NonFinite(format!("band {band}, pixel {pixel}")));
        }
        Ok(Self { height, width, data, band_wavelengths: None })
    }

    pub fn with_wavelengths(mut self, wavelengths: Vec<f64>) -> Result<Self> {
        if wavelengths.len() != self.bands() {
            return Err(Error::DimensionMismatch(format!(
                "{} wavelengths for {} bands",
                wavelengths.len(),
                self.bands()
            )));
        }
        self.band_wavelengths = Some(wavelengths);
        Ok(self)
    }

    pub fn bands(&self) -> usize {
        self.data.nrows()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> usize {
        self.data.ncols()
    }

    /// The `bands × pixels` matrix.
    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn band_wavelengths(&self) -> Option<&[f64]> {
        self.band_wavelengths.as_deref()
    }

    /// Spectral signature of pixel `i` (contiguous, since storage is column-major).
    pub fn spectrum(&self, i: usize) -> &[f64] {
        let p = self.bands();
        &self.data.as_slice()[i * p..(i + 1) * p]
    }

    /// Band values in row-major pixel order.
    pub fn band(&self, b: usize) -> Vec<f64> {
        self.data.row(b).iter().copied().collect()
    }

    /// Rescales every band independently to `[0, 1]`. Constant bands become 0.
    pub fn min_max_scaled(&self) -> Self {
        let mut data = self.data.clone();
        for mut row in data.row_iter_mut() {
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            for v in row.iter_mut() {
                *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
            }
        }
        Self { data, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorSpace {
    Rgb,
    Lab,
}

impl fmt::Display for ColorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorSpace::Rgb => f.write_str("RGB"),
            ColorSpace::Lab => f.write_str("Lab"),
        }
    }
}

/// A three-channel image tagged with its color space. Channels are rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    space: ColorSpace,
    height: usize,
    width: usize,
    data: DMatrix<f64>,
}

impl ColorImage {
    pub fn new(space: ColorSpace, height: usize, width: usize, data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() != 3 {
            return Err(Error::DimensionMismatch(format!(
                "color image needs 3 channels, got {}",
                data.nrows()
            )));
        }
        if height == 0 || width == 0 || data.ncols() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{} pixel columns for a {height}x{width} grid",
                data.ncols()
            )));
        }
        for (pos, v) in data.iter().enumerate() {
            let ok = match space {
                ColorSpace::Rgb => (0.0..=1.0).contains(v),
                ColorSpace::Lab => v.is_finite(),
            };
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "{space} value {v} out of range at channel {}, pixel {}",
                    pos % 3,
                    pos / 3
                )));
            }
        }
        Ok(Self { space, height, width, data })
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> usize {
        self.data.ncols()
    }

    /// The `3 × pixels` matrix.
    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    pub(crate) fn expect_space(&self, expected: ColorSpace) -> Result<()> {
        if self.space != expected {
            return Err(Error::WrongColorSpace { expected, found: self.space });
        }
        Ok(())
    }
}

/// A `bands × 3` linear map from spectral space to the color working space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    weights: DMatrix<f64>,
}

impl ProjectionMatrix {
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        if weights.ncols() != 3 || weights.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "projection must be p x 3 with p >= 1, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        if weights.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("projection weights".into()));
        }
        Ok(Self { weights })
    }

    pub fn source_bands(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }
}
