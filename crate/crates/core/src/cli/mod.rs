//! Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage error.

mod args;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use clap::Parser;
use nalgebra::DMatrix;

pub use args::*;

use crate::correspondence::{
    pairs_from_homography, ransac_homography, read_homography, read_matches, read_pairs, sample_aligned,
    write_homography, Correspondence, GridShape,
};
use crate::error::Error;
use crate::graph::{knn_graph, KernelParams, SparseGraph};
use crate::hsi_io::{
    lab_to_rgb, read_cube, read_image, read_projection, rgb_to_lab, write_cube, write_image, write_projection,
    ColorImage, ColorSpace, SpectralCube,
};
use crate::metrics::{distance_sample, gamma, report_line};
use crate::solver::{
    apply_projection, direct_diagnostics, feature_level, instance_level, lpp_baseline, EmbeddingResult,
    SolveOptions,
};
use crate::synthetic::{generate, write_scene, SyntheticConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::VisualizeInstance(a) => cmd_visualize_instance(&a),
        Command::VisualizeFeature(a) => cmd_visualize_feature(&a),
        Command::ApplyProjection(a) => cmd_apply_projection(&a),
        Command::Register(a) => cmd_register(&a),
        Command::EvalDistance(a) => cmd_eval_distance(&a),
        Command::MakeSynthetic(a) => cmd_make_synthetic(&a),
        Command::VisualizeLpp(a) => cmd_visualize_lpp(&a),
    }
}

fn validate_graph(g: &GraphArgs) -> CliResult {
    if g.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    if !(0.0..=1.0).contains(&g.mu) {
        return Err(usage(format!("--mu must lie in [0, 1], got {}", g.mu)));
    }
    for (flag, v) in [("--delta-s", g.delta_s), ("--delta-w", g.delta_w), ("--spatial-sigma", Some(g.spatial_sigma))] {
        if let Some(v) = v {
            if !(v > 0.0) || !v.is_finite() {
                return Err(usage(format!("{flag} must be positive, got {v}")));
            }
        }
    }
    Ok(())
}

fn validate_solve(s: &SolveArgs) -> CliResult {
    if !(s.ridge >= 0.0) || !s.ridge.is_finite() {
        return Err(usage(format!("--ridge must be non-negative, got {}", s.ridge)));
    }
    if !(s.cg_tol > 0.0) || !s.cg_tol.is_finite() {
        return Err(usage(format!("--cg-tol must be positive, got {}", s.cg_tol)));
    }
    if s.cg_max_iter == Some(0) {
        return Err(usage("--cg-max-iter must be positive"));
    }
    Ok(())
}

fn validate_matches(m: &MatchArgs) -> CliResult {
    if let Some(f) = m.match_fraction {
        if !(f > 0.0 && f <= 1.0) {
            return Err(usage(format!("--match-fraction must lie in (0, 1], got {f}")));
        }
    }
    match (&m.pairs, m.match_fraction, &m.homography) {
        (Some(_), None, None) | (None, Some(_), _) => Ok(()),
        (None, None, Some(_)) => Err(usage("--homography needs --match-fraction")),
        (None, None, None) => Err(usage("give either --pairs or --match-fraction")),
        (Some(_), _, _) => Err(usage("--pairs cannot be combined with --match-fraction or --homography")),
    }
}

fn validate_visualize(a: &VisualizeArgs) -> CliResult {
    validate_graph(&a.graph)?;
    validate_solve(&a.solve)?;
    validate_matches(&a.matches)
}

fn load_cube(path: &std::path::Path, scale: bool) -> CliResult<SpectralCube> {
    let cube = read_cube(path)?;
    Ok(if scale { cube.min_max_scaled() } else { cube })
}

fn build_graph(cube: &SpectralCube, g: &GraphArgs, seed: u64) -> CliResult<SparseGraph> {
    let mut params = KernelParams {
        mu: g.mu,
        k: g.k,
        spatial_radius: g.spatial_radius,
        spatial_sigma: g.spatial_sigma,
        ..KernelParams::default()
    };
    if g.delta_s.is_none() || g.delta_w.is_none() {
        params = params.with_median_bandwidths(cube, seed)?;
    }
    if let Some(d) = g.delta_s {
        params.delta_s = d;
    }
    if let Some(d) = g.delta_w {
        params.delta_w = d;
    }
    let graph = knn_graph(cube, &params)?;
    if let Some(path) = &g.graph_dump {
        graph.write_dump(path)?;
    }
    Ok(graph)
}

fn build_correspondence(cube: &SpectralCube, reference: &ColorImage, m: &MatchArgs, seed: u64) -> CliResult<Correspondence> {
    let cube_shape = GridShape::new(cube.height(), cube.width());
    let ref_shape = GridShape::new(reference.height(), reference.width());
    Ok(match (&m.pairs, m.match_fraction, &m.homography) {
        (Some(path), _, _) => read_pairs(path, cube_shape, ref_shape)?,
        (None, Some(f), Some(h)) => pairs_from_homography(&read_homography(h)?, cube_shape, ref_shape, f, seed)?,
        (None, Some(f), None) => {
            if cube_shape != ref_shape {
                return Err(Error::DimensionMismatch(format!(
                    "aligned sampling needs equal grids, cube is {}x{}, reference {}x{}",
                    cube_shape.height, cube_shape.width, ref_shape.height, ref_shape.width
                ))
                .into());
            }
            sample_aligned(cube_shape.pixels(), f, seed)?
        }
        (None, None, _) => return Err(usage("give either --pairs or --match-fraction")),
    })
}

fn solve_options(s: &SolveArgs) -> SolveOptions {
    SolveOptions { lambda: s.lambda, cg_tol: s.cg_tol, cg_max_iter: s.cg_max_iter, ridge: s.ridge, jacobi: s.jacobi }
}

/// Writes the RGB rendering and, optionally, the raw Lαβ values.
fn write_outputs(
    y: &DMatrix<f64>,
    cube: &SpectralCube,
    out: &std::path::Path,
    lab_out: Option<&std::path::Path>,
) -> CliResult {
    let lab = ColorImage::new(ColorSpace::Lab, cube.height(), cube.width(), y.clone())?;
    write_image(&lab_to_rgb(&lab)?, out)?;
    if let Some(path) = lab_out {
        write_cube(&SpectralCube::new(cube.height(), cube.width(), y.clone())?, path)?;
    }
    Ok(())
}

struct Prepared {
    cube: SpectralCube,
    reference_lab: ColorImage,
    corr: Correspondence,
    graph: SparseGraph,
}

fn prepare(a: &VisualizeArgs) -> CliResult<Prepared> {
    validate_visualize(a)?;
    let cube = load_cube(&a.cube, a.graph.scale_bands)?;
    let reference_lab = rgb_to_lab(&read_image(&a.reference)?)?;
    let corr = build_correspondence(&cube, &reference_lab, &a.matches, a.seed)?;
    let graph = build_graph(&cube, &a.graph, a.seed)?;
    Ok(Prepared { cube, reference_lab, corr, graph })
}

fn report_convergence(result: &EmbeddingResult) {
    if !result.all_converged() {
        eprintln!("warning: conjugate gradient hit the iteration cap; result may be inaccurate");
    }
}

fn cmd_visualize_instance(a: &VisualizeArgs) -> CliResult {
    let Prepared { cube, reference_lab, corr, graph } = prepare(a)?;
    let result = instance_level(&graph, &corr, &reference_lab, &solve_options(&a.solve))?;
    write_outputs(&result.y, &cube, &a.out, a.lab_out.as_deref())?;
    println!("{}", result.diagnostics());
    report_convergence(&result);
    Ok(())
}

fn cmd_visualize_feature(a: &FeatureArgs) -> CliResult {
    let c = &a.common;
    let Prepared { cube, reference_lab, corr, graph } = prepare(c)?;
    let fit = feature_level(&cube, &graph, &corr, &reference_lab, &solve_options(&c.solve))?;
    write_projection(&fit.projection, &a.projection_out)?;
    let result = apply_projection(&fit.projection, &cube)?;
    write_outputs(&result.y, &cube, &c.out, c.lab_out.as_deref())?;
    println!("{}", direct_diagnostics(fit.lambda));
    Ok(())
}

fn cmd_apply_projection(a: &ApplyArgs) -> CliResult {
    let projection = read_projection(&a.projection)?;
    let cube = load_cube(&a.cube, a.scale_bands)?;
    let result = apply_projection(&projection, &cube)?;
    write_outputs(&result.y, &cube, &a.out, a.lab_out.as_deref())
}

fn cmd_register(a: &RegisterArgs) -> CliResult {
    if !(a.inlier_px > 0.0) || !a.inlier_px.is_finite() {
        return Err(usage(format!("--inlier-px must be positive, got {}", a.inlier_px)));
    }
    if a.iters == 0 {
        return Err(usage("--iters must be positive"));
    }
    let matches = read_matches(&a.matches)?;
    let (src, dst): (Vec<[f64; 2]>, Vec<[f64; 2]>) = matches.iter().copied().unzip();
    let fit = ransac_homography(&src, &dst, a.inlier_px, a.iters, a.seed)?;
    write_homography(&fit.homography, &a.homography_out)?;

    let mut seen = BTreeSet::new();
    let mut text = String::from("# hsi_row,hsi_col,ref_row,ref_col\n");
    for ((s, d), _) in matches.iter().zip(&fit.inliers).filter(|(_, &keep)| keep) {
        let cells = [s[1].round(), s[0].round(), d[1].round(), d[0].round()];
        if cells.iter().any(|v| *v < 0.0) {
            continue;
        }
        let key = cells.map(|v| v as u64);
        if seen.insert(key) {
            writeln!(text, "{},{},{},{}", key[0], key[1], key[2], key[3]).expect("writing to a String");
        }
    }
    fs::write(&a.pairs_out, text).map_err(|e| Error::Io { path: a.pairs_out.clone(), source: e })?;
    println!("inliers={}/{}", fit.inlier_count(), matches.len());
    Ok(())
}

fn cmd_eval_distance(a: &EvalArgs) -> CliResult {
    let cube = read_cube(&a.cube)?;
    let lab = match (&a.image, &a.lab_cube) {
        (Some(img), None) => rgb_to_lab(&read_image(img)?)?,
        (None, Some(path)) => {
            let c = read_cube(path)?;
            if c.bands() != 3 {
                return Err(Error::DimensionMismatch(format!("--lab-cube needs 3 bands, got {}", c.bands())).into());
            }
            ColorImage::new(ColorSpace::Lab, c.height(), c.width(), c.data().clone())?
        }
        _ => return Err(usage("give exactly one of --image or --lab-cube")),
    };
    let sample = distance_sample(&cube, &lab, a.pair_budget, a.seed)?;
    let g = gamma(&sample)?;
    println!("{}", report_line(g, &sample));
    Ok(())
}

fn cmd_make_synthetic(a: &SyntheticArgs) -> CliResult {
    let config = SyntheticConfig {
        height: a.height,
        width: a.width,
        bands: a.bands,
        clusters: a.clusters,
        noise: a.noise,
        seed: a.seed,
        library_seed: a.library_seed,
    };
    let scene = generate(&config)?;
    write_scene(&scene, &a.cube, &a.reference, &a.labels)?;
    Ok(())
}

fn cmd_visualize_lpp(a: &LppArgs) -> CliResult {
    validate_graph(&a.graph)?;
    let cube = load_cube(&a.cube, a.graph.scale_bands)?;
    let graph = build_graph(&cube, &a.graph, a.seed)?;
    let lpp = lpp_baseline(&cube, &graph)?;
    let mut y = apply_projection(&lpp.projection, &cube)?.y;
    // no color anchor, so stretch each channel for display
    for mut row in y.row_iter_mut() {
        let lo = row.min();
        let span = row.max() - lo;
        row.apply(|v| *v = if span > 0.0 { (*v - lo) / span } else { 0.5 });
    }
    write_image(&ColorImage::new(ColorSpace::Rgb, cube.height(), cube.width(), y)?, &a.out)?;
    let _ = writeln!(std::io::stdout(), "eigenvalues={},{},{}", lpp.eigenvalues[0], lpp.eigenvalues[1], lpp.eigenvalues[2]);
    Ok(())
}
