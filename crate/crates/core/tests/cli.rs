mod common;

use std::fs;
use std::path::Path;

use common::*;
use hsivis::correspondence::{read_homography, write_matches};
use hsivis::hsi_io::{read_cube, read_projection, write_cube, write_image, ColorImage, ColorSpace, SpectralCube};
use hsivis::synthetic::read_labels;
use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::Rng;

fn synth(d: &Path, extra: &[&str]) {
    let p = |n: &str| path_str(d, n);
    let mut args = vec!["make-synthetic", "--cube", &p("c.hdr"), "--reference", &p("r.ppm"), "--labels", &p("l.csv")]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run_ok(&refs);
}

fn code(args: &[&str]) -> (i32, String) {
    let out = run_cli(args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn instance_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, &["--seed", "7"]);
    let p = |n: &str| path_str(d, n);
    let out = run_ok(&["visualize-instance", "--cube", &p("c.hdr"), "--reference", &p("r.ppm"), "--out", &p("y.ppm"),
        "--match-fraction", "0.1", "--seed", "7", "--graph-dump", &p("g.txt")]);
    assert!(out.starts_with("lambda="));
    assert!(out.contains(" iters=") && out.contains(" res="));
    assert!(file(d, "y.ppm").exists());
    assert!(fs::read_to_string(p("g.txt")).unwrap().starts_with("256 "));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, &[]);
    let p = |n: &str| path_str(d, n);
    let base = ["visualize-instance", "--cube", &p("c.hdr"), "--reference", &p("r.ppm"), "--out", &p("y.ppm")];
    assert_eq!(code(&base).0, 2);
    assert_eq!(code(&[&base[..], &["--match-fraction", "0.1", "--mu", "1.5"]].concat()).0, 2);
    assert_eq!(code(&[&base[..], &["--match-fraction", "0.1", "--k", "0"]].concat()).0, 2);
    assert_eq!(code(&[&base[..], &["--match-fraction", "0.1", "--lambda", "-3"]].concat()).0, 2);
    assert_eq!(code(&[&base[..], &["--match-fraction", "2"]].concat()).0, 2);
    assert_eq!(code(&["no-such-command"]).0, 2);
    // validation happens before any file is touched
    assert_eq!(code(&["visualize-instance", "--cube", "/missing.hdr", "--reference", "/missing.ppm", "--out", "/x.ppm",
        "--match-fraction", "0.1", "--cg-tol", "0"]).0, 2);
}

#[test]
fn unconstrained_component_names_a_pixel() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // two far-apart spectral groups; only the first one gets a pair
    let data = DMatrix::from_fn(2, 8, |b, i| if i < 4 { 0.1 * (b + i) as f64 } else { 50.0 + 0.1 * (b + i) as f64 });
    write_cube(&SpectralCube::new(2, 4, data).unwrap(), file(d, "c.hdr")).unwrap();
    write_image(&ColorImage::new(ColorSpace::Rgb, 2, 4, DMatrix::from_element(3, 8, 0.5)).unwrap(), file(d, "r.ppm")).unwrap();
    fs::write(file(d, "p.csv"), "0,0,0,0\n").unwrap();
    let p = |n: &str| path_str(d, n);
    let args = ["visualize-instance", "--cube", &p("c.hdr"), "--reference", &p("r.ppm"), "--pairs", &p("p.csv"),
        "--out", &p("y.ppm"), "--k", "2", "--delta-s", "1", "--delta-w", "1"];
    let (status, stderr) = code(&args);
    assert_eq!(status, 1);
    assert!(stderr.contains("pixel 4"), "{stderr}");
    run_ok(&[&args[..], &["--ridge", "1e-3"]].concat());
}

#[test]
fn feature_writes_a_parseable_projection() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, &["--seed", "7"]);
    let p = |n: &str| path_str(d, n);
    let out = run_ok(&["visualize-feature", "--cube", &p("c.hdr"), "--reference", &p("r.ppm"), "--out", &p("y.ppm"),
        "--match-fraction", "0.1", "--seed", "7", "--projection-out", &p("F.txt")]);
    let f = read_projection(p("F.txt")).unwrap();
    assert_eq!(f.source_bands(), 8);
    assert_eq!(fs::read_to_string(p("F.txt")).unwrap().lines().count(), 9);
    let lambda: f64 = out.trim().strip_prefix("lambda=").unwrap().split(' ').next().unwrap().parse().unwrap();
    assert_eq!(lambda, (10 * 256) as f64 / 26.0);
}

#[test]
fn two_band_cube_gives_a_two_by_three_projection() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, &["--bands", "2", "--seed", "1"]);
    let p = |n: &str| path_str(d, n);
    run_ok(&["visualize-feature", "--cube", &p("c.hdr"), "--reference", &p("r.ppm"), "--out", &p("y.ppm"),
        "--match-fraction", "0.2", "--projection-out", &p("F.txt")]);
    let f = read_projection(p("F.txt")).unwrap();
    assert_eq!(f.weights().shape(), (2, 3));
}

#[test]
fn band_mismatch_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, &["--bands", "16"]);
    let f = hsivis::hsi_io::ProjectionMatrix::new(DMatrix::zeros(18, 3)).unwrap();
    hsivis::hsi_io::write_projection(&f, file(d, "F.txt")).unwrap();
    let p = |n: &str| path_str(d, n);
    let (status, stderr) = code(&["apply-projection", "--cube", &p("c.hdr"), "--projection", &p("F.txt"), "--out", &p("y.ppm")]);
    assert_eq!(status, 1);
    assert!(stderr.starts_with("error: "));
}

fn planted_matches(d: &Path, count: usize, outliers: usize, seed: u64) -> Matrix3<f64> {
    let mut rng = rng(seed);
    let truth = Matrix3::new(1.05, 0.02, 4.0, -0.03, 0.97, -6.0, 2e-4, -1e-4, 1.0);
    let matches: Vec<_> = (0..count)
        .map(|k| {
            let s = [rng.random_range(0.0..150.0), rng.random_range(0.0..150.0)];
            let t = if k < count - outliers {
                let v = truth * Vector3::new(s[0], s[1], 1.0);
                [v[0] / v[2], v[1] / v[2]]
            } else {
                [rng.random_range(0.0..150.0), rng.random_range(0.0..150.0)]
            };
            (s, t)
        })
        .collect();
    write_matches(&matches, file(d, "m.csv")).unwrap();
    truth
}

#[test]
fn register_recovers_a_planted_transform() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let truth = planted_matches(d, 100, 30, 3);
    let p = |n: &str| path_str(d, n);
    let out = run_ok(&["register", "--matches", &p("m.csv"), "--homography-out", &p("H.txt"), "--pairs-out", &p("pairs.csv"),
        "--inlier-px", "2", "--iters", "500", "--seed", "1"]);
    assert!(out.starts_with("inliers="));
    let h = read_homography(p("H.txt")).unwrap();
    assert!((h.matrix() - truth).abs().max() < 1e-3);
    assert_eq!(fs::read_to_string(p("H.txt")).unwrap().lines().count(), 3);
    let pairs = fs::read_to_string(p("pairs.csv")).unwrap();
    assert!(pairs.lines().filter(|l| !l.starts_with('#')).count() >= 60);
}

#[test]
fn register_needs_four_matches() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    planted_matches(d, 3, 0, 4);
    let p = |n: &str| path_str(d, n);
    let (status, _) = code(&["register", "--matches", &p("m.csv"), "--homography-out", &p("H.txt"), "--pairs-out", &p("x.csv")]);
    assert_eq!(status, 1);
}

#[test]
fn eval_distance_reports_and_rejects_constant_images() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, &[]);
    let cube = read_cube(file(d, "c.hdr")).unwrap();
    let three = SpectralCube::new(16, 16, cube.data().rows(0, 3).into_owned()).unwrap();
    write_cube(&three, file(d, "three.hdr")).unwrap();
    let p = |n: &str| path_str(d, n);
    let line = run_ok(&["eval-distance", "--cube", &p("three.hdr"), "--lab-cube", &p("three.hdr"), "--pair-budget", "all"]);
    let parts: Vec<&str> = line.trim().split(' ').collect();
    assert_eq!(parts.len(), 3);
    let g: f64 = parts[0].strip_prefix("gamma=").unwrap().parse().unwrap();
    assert!((g - 1.0).abs() <= 1e-12);
    assert_eq!(parts[1], "pairs=32640");
    assert_eq!(parts[2], "seed=0");

    write_image(&ColorImage::new(ColorSpace::Rgb, 16, 16, DMatrix::from_element(3, 256, 0.3)).unwrap(), file(d, "flat.ppm")).unwrap();
    let (status, stderr) = code(&["eval-distance", "--cube", &p("c.hdr"), "--image", &p("flat.ppm")]);
    assert_eq!(status, 1);
    assert!(stderr.contains("zero variance"), "{stderr}");
}

#[test]
fn make_synthetic_contracts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [a.path(), b.path()] {
        synth(d, &["--height", "16", "--width", "16", "--bands", "8", "--clusters", "4", "--seed", "3"]);
    }
    for name in ["c.hdr", "c.raw", "r.ppm", "l.csv"] {
        assert_eq!(fs::read(file(a.path(), name)).unwrap(), fs::read(file(b.path(), name)).unwrap());
    }
    let labels = read_labels(file(a.path(), "l.csv")).unwrap();
    assert_eq!(labels.len(), 256);
    assert_eq!(fs::read_to_string(file(a.path(), "l.csv")).unwrap().lines().count(), 256);

    let c = tempfile::tempdir().unwrap();
    synth(c.path(), &["--noise", "0", "--seed", "3"]);
    let cube = read_cube(file(c.path(), "c.hdr")).unwrap();
    let labels = read_labels(file(c.path(), "l.csv")).unwrap();
    for i in 0..256 {
        for j in 0..256 {
            if labels[i] == labels[j] {
                assert_eq!(cube.spectrum(i), cube.spectrum(j));
            }
        }
    }
    assert_eq!(code(&["make-synthetic", "--cube", "/tmp/x.hdr", "--reference", "/tmp/x.ppm", "--labels", "/tmp/x.csv", "--width", "0"]).0, 1);
}
