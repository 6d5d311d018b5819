//! Seeded synthetic scenes: spatial clusters whose spectra are a linear
//! image of natural Lαβ colors, plus a pixel-aligned reference RGB image.
//!
//! Noise-free spectra are `mixing * (lab - mean_lab) + offset` with the offset
//! orthogonal to the columns of `mixing`. Values are not clamped to `[0, 1]`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector, RowDVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::hsi_io::{rgb_to_lab, write_cube, write_image, ColorImage, ColorSpace, SpectralCube};

const PALETTE: [[f64; 3]; 8] = [
    [0.24, 0.45, 0.16], // grass
    [0.55, 0.40, 0.26], // bare soil
    [0.12, 0.28, 0.50], // water
    [0.62, 0.60, 0.58], // concrete
    [0.85, 0.76, 0.55], // sand
    [0.66, 0.25, 0.20], // tile roof
    [0.10, 0.25, 0.12], // forest
    [0.35, 0.35, 0.37], // asphalt
];

/// Column norm of the color-to-spectrum map.
const MIXING_SCALE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub height: usize,
    pub width: usize,
    pub bands: usize,
    pub clusters: usize,
    /// Standard deviation of additive Gaussian noise per band.
    pub noise: f64,
    /// Drives the spatial layout and the noise.
    pub seed: u64,
    /// Drives the spectral library; scenes sharing it come from the same "sensor".
    pub library_seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self { height: 16, width: 16, bands: 8, clusters: 4, noise: 0.01, seed: 0, library_seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub cube: SpectralCube,
    pub reference: ColorImage,
    /// Cluster index per pixel.
    pub labels: Vec<usize>,
    /// RGB color of each cluster.
    pub cluster_rgb: Vec<[f64; 3]>,
    /// `bands × 3` map from centered Lαβ to noise-free spectra, offset excluded.
    pub mixing: DMatrix<f64>,
}

fn cluster_colors(clusters: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    (0..clusters)
        .map(|c| match PALETTE.get(c) {
            Some(rgb) => *rgb,
            None => [rng.random_range(0.1..0.9), rng.random_range(0.1..0.9), rng.random_range(0.1..0.9)],
        })
        .collect()
}

fn mixing_matrix(bands: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let gaussian = DMatrix::from_fn(bands, 3, |_, _| StandardNormal.sample(rng));
    if bands >= 3 {
        gaussian.qr().q() * MIXING_SCALE
    } else {
        gaussian * (MIXING_SCALE / 3f64.sqrt())
    }
}

pub fn generate(config: &SyntheticConfig) -> Result<SyntheticScene> {
    let SyntheticConfig { height, width, bands, clusters, noise, seed, library_seed } = *config;
    let n = height * width;
    if height == 0 || width == 0 || bands == 0 {
        return Err(Error::InvalidArgument(format!("invalid dimensions {height}x{width}x{bands}")));
    }
    if clusters == 0 || clusters > n {
        return Err(Error::InvalidArgument(format!("cluster count must lie in [1, {n}], got {clusters}")));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::InvalidArgument(format!("noise must be non-negative, got {noise}")));
    }

    let mut lib_rng = ChaCha8Rng::seed_from_u64(library_seed);
    let cluster_rgb = cluster_colors(clusters, &mut lib_rng);
    let mixing = mixing_matrix(bands, &mut lib_rng);
    let rgb = DMatrix::from_fn(3, clusters, |ch, c| cluster_rgb[c][ch]);
    let lab = rgb_to_lab(&ColorImage::new(ColorSpace::Rgb, 1, clusters, rgb)?)?;
    let mean_lab = lab.data().column_mean();
    let centered = lab.data() - &mean_lab * RowDVector::from_element(clusters, 1.0);
    let signatures = &mixing * centered;
    let base = DVector::from_fn(bands, |_, _| 0.5 + lib_rng.random_range(-0.1..0.1));
    let basis = mixing.clone().qr().q();
    let offset: Vec<f64> = (&base - &basis * basis.tr_mul(&base)).iter().copied().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<(f64, f64)> = rand::seq::index::sample(&mut rng, n, clusters)
        .into_iter()
        .map(|i| ((i / width) as f64, (i % width) as f64))
        .collect();
    let labels: Vec<usize> = (0..n)
        .map(|i| {
            let (r, c) = ((i / width) as f64, (i % width) as f64);
            let d2 = |&(cr, cc): &(f64, f64)| (r - cr).powi(2) + (c - cc).powi(2);
            (0..clusters).min_by(|&a, &b| d2(&centers[a]).total_cmp(&d2(&centers[b]))).expect("clusters >= 1")
        })
        .collect();

    let normal = Normal::new(0.0, noise).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut data = DMatrix::zeros(bands, n);
    for (i, &label) in labels.iter().enumerate() {
        for b in 0..bands {
            let clean = signatures[(b, label)] + offset[b];
            let v = if noise > 0.0 { clean + normal.sample(&mut rng) } else { clean };
            // stored as f32 on disk; keep the in-memory cube identical to a reloaded one
            data[(b, i)] = f64::from(v as f32);
        }
    }
    let cube = SpectralCube::new(height, width, data)?;
    let reference_data = DMatrix::from_fn(3, n, |ch, i| cluster_rgb[labels[i]][ch]);
    let reference = ColorImage::new(ColorSpace::Rgb, height, width, reference_data)?;
    Ok(SyntheticScene { cube, reference, labels, cluster_rgb, mixing })
}

/// Writes `row,col,label` lines, one per pixel, no header.
pub fn write_labels(labels: &[usize], width: usize, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    for (i, l) in labels.iter().enumerate() {
        writeln!(text, "{},{},{l}", i / width, i % width).expect("writing to a String");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, line)| {
            line.rsplit(',')
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::format(path, format!("line {}: bad label row `{line}`", k + 1)))
        })
        .collect()
}

/// Writes the cube header (+ raw), reference PPM and label CSV.
pub fn write_scene(
    scene: &SyntheticScene,
    cube_path: impl AsRef<Path>,
    reference_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<()> {
    write_cube(&scene.cube, cube_path)?;
    write_image(&scene.reference, reference_path)?;
    write_labels(&scene.labels, scene.cube.width(), labels_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let cfg = SyntheticConfig { seed: 3, ..Default::default() };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.cube, b.cube);
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn noise_free_clusters_are_constant() {
        let scene = generate(&SyntheticConfig { noise: 0.0, ..Default::default() }).unwrap();
        for i in 0..scene.labels.len() {
            for j in 0..scene.labels.len() {
                if scene.labels[i] == scene.labels[j] {
                    assert_eq!(scene.cube.spectrum(i), scene.cube.spectrum(j));
                }
            }
        }
    }

    #[test]
    fn every_cluster_present() {
        let scene = generate(&SyntheticConfig { clusters: 6, seed: 11, ..Default::default() }).unwrap();
        for c in 0..6 {
            assert!(scene.labels.contains(&c));
        }
    }

    #[test]
    fn same_library_same_signatures() {
        let a = generate(&SyntheticConfig { noise: 0.0, seed: 1, ..Default::default() }).unwrap();
        let b = generate(&SyntheticConfig { noise: 0.0, seed: 2, ..Default::default() }).unwrap();
        let first = |s: &SyntheticScene, c| s.labels.iter().position(|&l| l == c).unwrap();
        for c in 0..4 {
            assert_eq!(a.cube.spectrum(first(&a, c)), b.cube.spectrum(first(&b, c)));
        }
    }

    #[test]
    fn rejects_invalid_dims() {
        assert!(generate(&SyntheticConfig { height: 0, ..Default::default() }).is_err());
        assert!(generate(&SyntheticConfig { clusters: 0, ..Default::default() }).is_err());
        assert!(generate(&SyntheticConfig { noise: -1.0, ..Default::default() }).is_err());
    }

    #[test]
    fn labels_csv_has_one_row_per_pixel() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.csv");
        let scene = generate(&SyntheticConfig::default()).unwrap();
        write_labels(&scene.labels, 16, &p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap().lines().count(), 256);
        assert_eq!(read_labels(&p).unwrap(), scene.labels);
    }
}
