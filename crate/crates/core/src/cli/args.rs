use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::metrics::PairBudget;
use crate::solver::Lambda;

#[derive(Debug, Parser)]
#[command(name = "hsivis", version, about = "Natural-color visualization of hyperspectral cubes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the color of every pixel directly.
    VisualizeInstance(VisualizeArgs),
    /// Learn a reusable bands-to-color projection and render with it.
    VisualizeFeature(FeatureArgs),
    /// Render a cube with a previously learned projection.
    ApplyProjection(ApplyArgs),
    /// Fit a homography to keypoint matches with RANSAC.
    Register(RegisterArgs),
    /// Report the preservation-of-distance correlation.
    EvalDistance(EvalArgs),
    /// Write a seeded synthetic cube, reference image and label map.
    MakeSynthetic(SyntheticArgs),
    /// Unconstrained locality preserving projection, stretched for display.
    VisualizeLpp(LppArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Neighbors per pixel in the kNN graph.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Spectral weight of the composite kernel (spatial gets 1 - mu).
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    /// Spectral RBF bandwidth; defaults to the median sampled pair distance.
    #[arg(long = "delta-s")]
    pub delta_s: Option<f64>,
    /// Spatial RBF bandwidth; defaults to the median sampled pair distance.
    #[arg(long = "delta-w")]
    pub delta_w: Option<f64>,
    #[arg(long = "spatial-radius", default_value_t = 2)]
    pub spatial_radius: usize,
    #[arg(long = "spatial-sigma", default_value_t = 1.0)]
    pub spatial_sigma: f64,
    /// Rescale every band to [0, 1] before graph construction and solving.
    #[arg(long = "scale-bands")]
    pub scale_bands: bool,
    /// Also write the graph as an edge list.
    #[arg(long = "graph-dump")]
    pub graph_dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Constraint weight, or `auto` for k * n / pairs.
    #[arg(long, default_value = "auto", value_parser = parse_lambda)]
    pub lambda: Lambda,
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    #[arg(long = "cg-tol", default_value_t = 1e-8)]
    pub cg_tol: f64,
    #[arg(long = "cg-max-iter")]
    pub cg_max_iter: Option<usize>,
    /// Jacobi-precondition the conjugate gradient solves.
    #[arg(long)]
    pub jacobi: bool,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Pairs CSV (`hsi_row,hsi_col,ref_row,ref_col`).
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Fraction of cube pixels to pair; aligned grids unless --homography is given.
    #[arg(long = "match-fraction")]
    pub match_fraction: Option<f64>,
    /// Homography file mapping cube (x, y) to reference (x, y).
    #[arg(long)]
    pub homography: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VisualizeArgs {
    #[arg(long)]
    pub cube: PathBuf,
    /// Reference RGB image (binary PPM).
    #[arg(long)]
    pub reference: PathBuf,
    /// Output PPM.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the Lαβ result as a 3-band cube.
    #[arg(long = "lab-out")]
    pub lab_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub matches: MatchArgs,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Args)]
pub struct FeatureArgs {
    #[command(flatten)]
    pub common: VisualizeArgs,
    /// Where to write the learned projection.
    #[arg(long = "projection-out")]
    pub projection_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub cube: PathBuf,
    #[arg(long)]
    pub projection: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "lab-out")]
    pub lab_out: Option<PathBuf>,
    #[arg(long = "scale-bands")]
    pub scale_bands: bool,
}

#[derive(Debug, Args)]
pub struct RegisterArgs {
    /// Keypoint matches CSV (`x,y,xp,yp`).
    #[arg(long)]
    pub matches: PathBuf,
    #[arg(long = "homography-out")]
    pub homography_out: PathBuf,
    /// Inlier matches rounded to grid coordinates.
    #[arg(long = "pairs-out")]
    pub pairs_out: PathBuf,
    #[arg(long = "inlier-px", default_value_t = 3.0)]
    pub inlier_px: f64,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub cube: PathBuf,
    /// Rendered RGB image (binary PPM), converted to Lαβ.
    #[arg(long, conflicts_with = "lab_cube", required_unless_present = "lab_cube")]
    pub image: Option<PathBuf>,
    /// A 3-band cube whose values are used directly as Lαβ coordinates.
    #[arg(long = "lab-cube")]
    pub lab_cube: Option<PathBuf>,
    /// Pixel pairs to sample, or `all`.
    #[arg(long = "pair-budget", default_value = "100000", value_parser = parse_budget)]
    pub pair_budget: PairBudget,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SyntheticArgs {
    #[arg(long)]
    pub cube: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub height: usize,
    #[arg(long, default_value_t = 16)]
    pub width: usize,
    #[arg(long, default_value_t = 8)]
    pub bands: usize,
    #[arg(long, default_value_t = 4)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "library-seed", default_value_t = 0)]
    pub library_seed: u64,
}

#[derive(Debug, Args)]
pub struct LppArgs {
    #[arg(long)]
    pub cube: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub graph: GraphArgs,
}

fn parse_lambda(s: &str) -> Result<Lambda, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_budget(s: &str) -> Result<PairBudget, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}
