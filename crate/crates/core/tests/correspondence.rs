mod common;

use std::fs;

use common::*;
use hsivis::correspondence::{
    fit_homography, pairs_from_homography, ransac_homography, read_homography, read_pairs, sample_aligned,
    write_homography, write_pairs, Correspondence, GridShape, Homography,
};
use hsivis::Error;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use rand::Rng;

fn project(h: &Matrix3<f64>, pts: &[[f64; 2]]) -> Vec<[f64; 2]> {
    pts.iter()
        .map(|p| {
            let v = h * Vector3::new(p[0], p[1], 1.0);
            [v[0] / v[2], v[1] / v[2]]
        })
        .collect()
}

fn random_h(rng: &mut rand_chacha::ChaCha8Rng) -> Matrix3<f64> {
    Matrix3::new(
        rng.random_range(0.7..1.3),
        rng.random_range(-0.3..0.3),
        rng.random_range(-30.0..30.0),
        rng.random_range(-0.3..0.3),
        rng.random_range(0.7..1.3),
        rng.random_range(-30.0..30.0),
        rng.random_range(-1e-3..1e-3),
        rng.random_range(-1e-3..1e-3),
        1.0,
    )
}

#[test]
fn aligned_sampling_examples() {
    let full = sample_aligned(25, 1.0, 3).unwrap();
    assert_eq!(full.pairs(), (0..25).map(|i| (i, i)).collect::<Vec<_>>());
    assert!(full.row_sums().iter().all(|&r| r == 1));

    let a = sample_aligned(100, 0.1, 9).unwrap();
    assert_eq!(a.len(), 10);
    assert_eq!(a, sample_aligned(100, 0.1, 9).unwrap());

    let (x, y) = (sample_aligned(1000, 0.1, 1).unwrap(), sample_aligned(1000, 0.1, 2).unwrap());
    assert_eq!((x.len(), y.len()), (100, 100));
    assert_ne!(x.pairs(), y.pairs());

    assert!(sample_aligned(10, 0.0, 0).is_err());
    assert!(sample_aligned(10, 1.5, 0).is_err());
}

#[test]
fn pairs_file_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    fs::write(&path, "# hsi_row,hsi_col,ref_row,ref_col\n0,0,0,0\n").unwrap();
    let c = read_pairs(&path, GridShape::new(2, 2), GridShape::new(2, 2)).unwrap();
    assert_eq!(c.pairs(), &[(0, 0)]);

    fs::write(&path, "1,1,0,1\n").unwrap();
    let c = read_pairs(&path, GridShape::new(2, 2), GridShape::new(2, 3)).unwrap();
    assert_eq!(c.pairs(), &[(3, 1)]);

    fs::write(&path, "0,0,0,0\n2,0,0,0\n").unwrap();
    let err = read_pairs(&path, GridShape::new(2, 2), GridShape::new(2, 2)).unwrap_err().to_string();
    assert!(err.contains("line 2"), "{err}");

    fs::write(&path, "0,0,0,0\n0,0,0,0\n").unwrap();
    assert!(read_pairs(&path, GridShape::new(2, 2), GridShape::new(2, 2)).is_err());
}

#[test]
fn pairs_file_round_trip() {
    let c = Correspondence::new(12, 6, vec![(0, 5), (3, 1), (3, 2), (11, 0)]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    write_pairs(&c, &path, GridShape::new(3, 4), GridShape::new(2, 3)).unwrap();
    assert_eq!(read_pairs(&path, GridShape::new(3, 4), GridShape::new(2, 3)).unwrap(), c);
}

#[test]
fn homography_examples() {
    let mut rng = rng(21);
    for _ in 0..5 {
        let truth = random_h(&mut rng);
        let src: Vec<[f64; 2]> = (0..20).map(|_| [rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)]).collect();
        let dst = project(&truth, &src);
        let h = fit_homography(&src, &dst).unwrap();
        for (s, d) in src.iter().zip(&dst) {
            assert!(h.reprojection_error(*s, *d) < 1e-8);
        }
        let back = fit_homography(&dst, &src).unwrap();
        let composed = h.matrix() * back.matrix();
        let composed = composed / composed[(2, 2)];
        assert!((composed - Matrix3::identity()).abs().max() < 1e-6);
    }
}

#[test]
fn ransac_is_deterministic_and_needs_four_pairs() {
    let mut rng = rng(22);
    let truth = random_h(&mut rng);
    let src: Vec<[f64; 2]> = (0..40).map(|_| [rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)]).collect();
    let mut dst = project(&truth, &src);
    for q in dst.iter_mut().step_by(4) {
        *q = [rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)];
    }
    let a = ransac_homography(&src, &dst, 1.0, 200, 5).unwrap();
    let b = ransac_homography(&src, &dst, 1.0, 200, 5).unwrap();
    assert_eq!(a, b);
    assert!(matches!(
        ransac_homography(&src[..3], &dst[..3], 1.0, 10, 0),
        Err(Error::InsufficientPairs { .. })
    ));
}

#[test]
fn homography_mapping_examples() {
    let shape = GridShape::new(6, 7);
    let id = pairs_from_homography(&Homography::identity(), shape, shape, 1.0, 4).unwrap();
    assert_eq!(id, sample_aligned(42, 1.0, 4).unwrap());

    let away = Homography::from_row_slice(&[1.0, 0.0, 7.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(matches!(pairs_from_homography(&away, shape, shape, 1.0, 0), Err(Error::AllOutside)));
}

#[test]
fn homography_file_round_trip() {
    let mut rng = rng(23);
    let h = Homography::new(random_h(&mut rng)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    write_homography(&h, &path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 3);
    assert_eq!(read_homography(&path).unwrap(), h);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginals_count_pairs(n in 1usize..30, m in 1usize..30, raw in prop::collection::vec((0usize..1000, 0usize..1000), 1..60)) {
        let pairs: Vec<_> = raw.iter().map(|&(i, j)| (i % n, j % m)).collect();
        let c = Correspondence::new(n, m, pairs.clone()).unwrap();
        prop_assert_eq!(c.row_sums().iter().sum::<usize>(), c.len());
        prop_assert_eq!(c.col_sums().iter().sum::<usize>(), c.len());
        let mut unique = pairs;
        unique.sort_unstable();
        unique.dedup();
        prop_assert_eq!(c.len(), unique.len());
    }

    #[test]
    fn fit_is_exact_on_noiseless_data(seed in any::<u64>(), count in 4usize..30) {
        let mut rng = rng(seed);
        let truth = random_h(&mut rng);
        let src: Vec<[f64; 2]> = (0..count).map(|_| [rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)]).collect();
        let dst = project(&truth, &src);
        let h = fit_homography(&src, &dst).unwrap();
        for (s, d) in src.iter().zip(&dst) {
            prop_assert!(h.reprojection_error(*s, *d) < 1e-8);
        }
    }
}
