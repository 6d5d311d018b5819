//! C ABI over the `hsivis` library.
//!
//! Objects cross the boundary as opaque handles created by `*_read`,
//! `*_from_data` or a solver and released with the matching `*_free`.
//! Every fallible function returns an [`HsivisStatus`]; on failure the
//! message is available from [`hsivis_last_error_message`] on the same thread.
//!
//! Matrices are column-major with one column per pixel, so a cube buffer holds
//! `bands` consecutive values for pixel 0, then pixel 1, and so on. Pixels are
//! numbered row-major.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use hsivis::correspondence::{self, Correspondence, GridShape};
use hsivis::graph::{knn_graph, KernelParams, SparseGraph};
use hsivis::hsi_io::{self, ColorImage, ColorSpace, ProjectionMatrix, SpectralCube};
use hsivis::metrics::{self, PairBudget};
use hsivis::solver::{self, Lambda, SolveOptions};
use hsivis::Error;
use libc::{c_char, size_t};
use nalgebra::DMatrix;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsivisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    DimensionMismatch = 5,
    Singular = 6,
    Unconstrained = 7,
    NoConsensus = 8,
    UndefinedMetric = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsivisColorSpace {
    Rgb = 0,
    Lab = 1,
}

/// Graph construction settings. A non-positive `delta_s` or `delta_w` asks for
/// median bandwidths estimated with `bandwidth_seed`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HsivisGraphParams {
    pub k: size_t,
    pub mu: f64,
    pub delta_s: f64,
    pub delta_w: f64,
    pub spatial_radius: size_t,
    pub spatial_sigma: f64,
    pub bandwidth_seed: u64,
}

/// Solver settings. `lambda <= 0` selects the automatic rule and
/// `cg_max_iter == 0` the default cap.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HsivisSolveOptions {
    pub lambda: f64,
    pub cg_tol: f64,
    pub cg_max_iter: size_t,
    pub ridge: f64,
    pub jacobi: bool,
}

pub struct HsivisCube(SpectralCube);
pub struct HsivisImage(ColorImage);
pub struct HsivisGraph(SparseGraph);
pub struct HsivisCorrespondence(Correspondence);
pub struct HsivisProjection(ProjectionMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(HsivisStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => HsivisStatus::Io,
            Error::Format { .. } | Error::UnsupportedInterleave(_) => HsivisStatus::Format,
            Error::InvalidArgument(_) | Error::NonFinite(_) | Error::WrongColorSpace { .. } => HsivisStatus::InvalidArgument,
            Error::DimensionMismatch(_) => HsivisStatus::DimensionMismatch,
            Error::Singular(_) | Error::SolverBreakdown(_) | Error::DegenerateGeometry(_) => HsivisStatus::Singular,
            Error::UnconstrainedComponent { .. } => HsivisStatus::Unconstrained,
            Error::InsufficientPairs { .. } | Error::NoConsensus { .. } | Error::AllOutside => HsivisStatus::NoConsensus,
            Error::UndefinedMetric(_) => HsivisStatus::UndefinedMetric,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HsivisStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HsivisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsivisStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            HsivisStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(HsivisStatus::InvalidArgument, "path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, value: T) {
    if !out.is_null() {
        *out = value;
    }
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn copy_out(m: &DMatrix<f64>, out: *mut f64, len: usize) -> Result<(), Failure> {
    if len < m.len() {
        return Err(Failure(HsivisStatus::BufferTooSmall, format!("buffer holds {len} values, need {}", m.len())));
    }
    if m.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null("output buffer"));
    }
    ptr::copy_nonoverlapping(m.as_slice().as_ptr(), out, m.len());
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn points(xy: *const f64, count: usize, what: &str) -> Result<Vec<[f64; 2]>, Failure> {
    Ok(slice(xy, 2 * count, what)?.chunks_exact(2).map(|c| [c[0], c[1]]).collect())
}

unsafe fn put_homography(h: &correspondence::Homography, out: *mut f64) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("homography buffer"));
    }
    let m = h.matrix();
    for r in 0..3 {
        for c in 0..3 {
            *out.add(3 * r + c) = m[(r, c)];
        }
    }
    Ok(())
}

/// The message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hsivis_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn hsivis_graph_params_default() -> HsivisGraphParams {
    let d = KernelParams::default();
    HsivisGraphParams {
        k: d.k,
        mu: d.mu,
        delta_s: 0.0,
        delta_w: 0.0,
        spatial_radius: d.spatial_radius,
        spatial_sigma: d.spatial_sigma,
        bandwidth_seed: 0,
    }
}

#[no_mangle]
pub extern "C" fn hsivis_solve_options_default() -> HsivisSolveOptions {
    let d = SolveOptions::default();
    HsivisSolveOptions { lambda: 0.0, cg_tol: d.cg_tol, cg_max_iter: 0, ridge: d.ridge, jacobi: d.jacobi }
}

// cubes

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_cube_read(path: *const c_char, out: *mut *mut HsivisCube) -> HsivisStatus {
    guard(|| put(out, HsivisCube(hsi_io::read_cube(path_arg(path)?)?)))
}

/// # Safety
/// `cube` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hsivis_cube_write(cube: *const HsivisCube, path: *const c_char) -> HsivisStatus {
    guard(|| Ok(hsi_io::write_cube(&borrow(cube, "cube")?.0, path_arg(path)?)?))
}

/// Copies `height * width * bands` values from `data`.
///
/// # Safety
/// `data` must point to that many readable doubles.
#[no_mangle]
pub unsafe extern "C" fn hsivis_cube_from_data(
    height: size_t,
    width: size_t,
    bands: size_t,
    data: *const f64,
    out: *mut *mut HsivisCube,
) -> HsivisStatus {
    guard(|| {
        let len = height.checked_mul(width).and_then(|n| n.checked_mul(bands));
        let len = len.ok_or_else(|| Failure(HsivisStatus::InvalidArgument, "dimensions overflow".into()))?;
        let values = slice(data, len, "data")?;
        let cube = SpectralCube::new(height, width, DMatrix::from_column_slice(bands, height * width, values))?;
        put(out, HsivisCube(cube))
    })
}

/// # Safety
/// `cube` must be a live handle; null output pointers are skipped.
#[no_mangle]
pub unsafe extern "C" fn hsivis_cube_dims(
    cube: *const HsivisCube,
    height: *mut size_t,
    width: *mut size_t,
    bands: *mut size_t,
) -> HsivisStatus {
    guard(|| {
        let c = &borrow(cube, "cube")?.0;
        put_value(height, c.height());
        put_value(width, c.width());
        put_value(bands, c.bands());
        Ok(())
    })
}

/// # Safety
/// `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hsivis_cube_copy_data(cube: *const HsivisCube, out: *mut f64, len: size_t) -> HsivisStatus {
    guard(|| copy_out(borrow(cube, "cube")?.0.data(), out, len))
}

/// # Safety
/// `cube` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hsivis_cube_free(cube: *mut HsivisCube) {
    free(cube)
}

// images

fn space_in(space: HsivisColorSpace) -> ColorSpace {
    match space {
        HsivisColorSpace::Rgb => ColorSpace::Rgb,
        HsivisColorSpace::Lab => ColorSpace::Lab,
    }
}

/// Reads a binary PPM as an RGB image with channels in `[0, 1]`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_image_read(path: *const c_char, out: *mut *mut HsivisImage) -> HsivisStatus {
    guard(|| put(out, HsivisImage(hsi_io::read_image(path_arg(path)?)?)))
}

/// Writes an RGB image as a binary PPM.
///
/// # Safety
/// `image` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hsivis_image_write(image: *const HsivisImage, path: *const c_char) -> HsivisStatus {
    guard(|| Ok(hsi_io::write_image(&borrow(image, "image")?.0, path_arg(path)?)?))
}

/// Copies `3 * height * width` values from `data`.
///
/// # Safety
/// `data` must point to that many readable doubles.
#[no_mangle]
pub unsafe extern "C" fn hsivis_image_from_data(
    space: HsivisColorSpace,
    height: size_t,
    width: size_t,
    data: *const f64,
    out: *mut *mut HsivisImage,
) -> HsivisStatus {
    guard(|| {
        let n = height
            .checked_mul(width)
            .filter(|n| n.checked_mul(3).is_some())
            .ok_or_else(|| Failure(HsivisStatus::InvalidArgument, "dimensions overflow".into()))?;
        let values = slice(data, 3 * n, "data")?;
        let image = ColorImage::new(space_in(space), height, width, DMatrix::from_column_slice(3, n, values))?;
        put(out, HsivisImage(image))
    })
}

/// # Safety
/// `image` must be a live handle; null output pointers are skipped.
#[no_mangle]
pub unsafe extern "C" fn hsivis_image_dims(
    image: *const HsivisImage,
    height: *mut size_t,
    width: *mut size_t,
    space: *mut HsivisColorSpace,
) -> HsivisStatus {
    guard(|| {
        let i = &borrow(image, "image")?.0;
        put_value(height, i.height());
        put_value(width, i.width());
        let s = match i.space() {
            ColorSpace::Rgb => HsivisColorSpace::Rgb,
            ColorSpace::Lab => HsivisColorSpace::Lab,
        };
        put_value(space, s);
        Ok(())
    })
}

/// # Safety
/// `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hsivis_image_copy_data(image: *const HsivisImage, out: *mut f64, len: size_t) -> HsivisStatus {
    guard(|| copy_out(borrow(image, "image")?.0.data(), out, len))
}

/// # Safety
/// `image` must be a live RGB handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_image_rgb_to_lab(image: *const HsivisImage, out: *mut *mut HsivisImage) -> HsivisStatus {
    guard(|| put(out, HsivisImage(hsi_io::rgb_to_lab(&borrow(image, "image")?.0)?)))
}

/// # Safety
/// `image` must be a live Lab handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_image_lab_to_rgb(image: *const HsivisImage, out: *mut *mut HsivisImage) -> HsivisStatus {
    guard(|| put(out, HsivisImage(hsi_io::lab_to_rgb(&borrow(image, "image")?.0)?)))
}

/// # Safety
/// `image` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hsivis_image_free(image: *mut HsivisImage) {
    free(image)
}

// graphs

/// # Safety
/// `cube` and `params` must be valid and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_graph_build(
    cube: *const HsivisCube,
    params: *const HsivisGraphParams,
    out: *mut *mut HsivisGraph,
) -> HsivisStatus {
    guard(|| {
        let cube = &borrow(cube, "cube")?.0;
        let p = *borrow(params, "params")?;
        let mut kp = KernelParams {
            mu: p.mu,
            delta_s: p.delta_s,
            delta_w: p.delta_w,
            k: p.k,
            spatial_radius: p.spatial_radius,
            spatial_sigma: p.spatial_sigma,
        };
        if !(p.delta_s > 0.0) || !(p.delta_w > 0.0) {
            let median = kp.with_median_bandwidths(cube, p.bandwidth_seed)?;
            if !(p.delta_s > 0.0) {
                kp.delta_s = median.delta_s;
            }
            if !(p.delta_w > 0.0) {
                kp.delta_w = median.delta_w;
            }
        }
        put(out, HsivisGraph(knn_graph(cube, &kp)?))
    })
}

/// Number of undirected edges, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hsivis_graph_edge_count(graph: *const HsivisGraph) -> size_t {
    graph.as_ref().map_or(0, |g| g.0.edges().len())
}

/// # Safety
/// `graph` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hsivis_graph_free(graph: *mut HsivisGraph) {
    free(graph)
}

// correspondences

/// Pairs `ceil(fraction * n)` seeded pixels with the same index in an aligned reference.
///
/// # Safety
/// `out` must be a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_correspondence_sample_aligned(
    n: size_t,
    fraction: f64,
    seed: u64,
    out: *mut *mut HsivisCorrespondence,
) -> HsivisStatus {
    guard(|| put(out, HsivisCorrespondence(correspondence::sample_aligned(n, fraction, seed)?)))
}

/// Reads a `hsi_row,hsi_col,ref_row,ref_col` pairs file.
///
/// # Safety
/// `cube` and `reference` must be live handles and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hsivis_correspondence_read(
    path: *const c_char,
    cube: *const HsivisCube,
    reference: *const HsivisImage,
    out: *mut *mut HsivisCorrespondence,
) -> HsivisStatus {
    guard(|| {
        let c = &borrow(cube, "cube")?.0;
        let r = &borrow(reference, "reference")?.0;
        let corr = correspondence::read_pairs(
            path_arg(path)?,
            GridShape::new(c.height(), c.width()),
            GridShape::new(r.height(), r.width()),
        )?;
        put(out, HsivisCorrespondence(corr))
    })
}

/// Number of distinct pairs, or 0 for a null handle.
///
/// # Safety
/// `corr` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hsivis_correspondence_len(corr: *const HsivisCorrespondence) -> size_t {
    corr.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `corr` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hsivis_correspondence_free(corr: *mut HsivisCorrespondence) {
    free(corr)
}

// solvers

fn solve_options(o: &HsivisSolveOptions) -> SolveOptions {
    SolveOptions {
        lambda: if o.lambda > 0.0 { Lambda::Fixed(o.lambda) } else { Lambda::Auto },
        cg_tol: o.cg_tol,
        cg_max_iter: (o.cg_max_iter > 0).then_some(o.cg_max_iter),
        ridge: o.ridge,
        jacobi: o.jacobi,
    }
}

/// Solves for every pixel's color. `reference_lab` must be a Lab image; the
/// result is a Lab image on the cube's grid. `lambda_out` and `converged_out`
/// may be null.
///
/// # Safety
/// All handles must be live and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_solve_instance(
    cube: *const HsivisCube,
    graph: *const HsivisGraph,
    corr: *const HsivisCorrespondence,
    reference_lab: *const HsivisImage,
    options: *const HsivisSolveOptions,
    out: *mut *mut HsivisImage,
    lambda_out: *mut f64,
    converged_out: *mut bool,
) -> HsivisStatus {
    guard(|| {
        let cube = &borrow(cube, "cube")?.0;
        let graph = &borrow(graph, "graph")?.0;
        if graph.n() != cube.pixels() {
            return Err(Error::DimensionMismatch(format!("graph has {} nodes, cube {} pixels", graph.n(), cube.pixels())).into());
        }
        let opts = solve_options(borrow(options, "options")?);
        let result = solver::instance_level(graph, &borrow(corr, "correspondence")?.0, &borrow(reference_lab, "reference")?.0, &opts)?;
        let image = result.to_image(cube.height(), cube.width())?;
        put(out, HsivisImage(image))?;
        put_value(lambda_out, result.lambda.unwrap_or(f64::NAN));
        put_value(converged_out, result.all_converged());
        Ok(())
    })
}

/// Learns a `bands x 3` projection. `lambda_out` may be null.
///
/// # Safety
/// All handles must be live and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_solve_feature(
    cube: *const HsivisCube,
    graph: *const HsivisGraph,
    corr: *const HsivisCorrespondence,
    reference_lab: *const HsivisImage,
    options: *const HsivisSolveOptions,
    out: *mut *mut HsivisProjection,
    lambda_out: *mut f64,
) -> HsivisStatus {
    guard(|| {
        let opts = solve_options(borrow(options, "options")?);
        let fit = solver::feature_level(
            &borrow(cube, "cube")?.0,
            &borrow(graph, "graph")?.0,
            &borrow(corr, "correspondence")?.0,
            &borrow(reference_lab, "reference")?.0,
            &opts,
        )?;
        put(out, HsivisProjection(fit.projection))?;
        put_value(lambda_out, fit.lambda);
        Ok(())
    })
}

// projections

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_projection_read(path: *const c_char, out: *mut *mut HsivisProjection) -> HsivisStatus {
    guard(|| put(out, HsivisProjection(hsi_io::read_projection(path_arg(path)?)?)))
}

/// # Safety
/// `projection` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hsivis_projection_write(projection: *const HsivisProjection, path: *const c_char) -> HsivisStatus {
    guard(|| Ok(hsi_io::write_projection(&borrow(projection, "projection")?.0, path_arg(path)?)?))
}

/// Number of source bands, or 0 for a null handle.
///
/// # Safety
/// `projection` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hsivis_projection_bands(projection: *const HsivisProjection) -> size_t {
    projection.as_ref().map_or(0, |p| p.0.source_bands())
}

/// Copies the `bands x 3` weights column-major.
///
/// # Safety
/// `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hsivis_projection_copy_weights(
    projection: *const HsivisProjection,
    out: *mut f64,
    len: size_t,
) -> HsivisStatus {
    guard(|| copy_out(borrow(projection, "projection")?.0.weights(), out, len))
}

/// Projects a cube to a Lab image.
///
/// # Safety
/// Both handles must be live and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hsivis_projection_apply(
    projection: *const HsivisProjection,
    cube: *const HsivisCube,
    out: *mut *mut HsivisImage,
) -> HsivisStatus {
    guard(|| {
        let cube = &borrow(cube, "cube")?.0;
        let result = solver::apply_projection(&borrow(projection, "projection")?.0, cube)?;
        put(out, HsivisImage(result.to_image(cube.height(), cube.width())?))
    })
}

/// # Safety
/// `projection` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hsivis_projection_free(projection: *mut HsivisProjection) {
    free(projection)
}

// metrics and registration

/// Preservation-of-distance correlation between a cube and a Lab image on the
/// same grid. `pair_budget == 0` uses every pixel pair.
///
/// # Safety
/// Both handles must be live and `gamma_out` writable.
#[no_mangle]
pub unsafe extern "C" fn hsivis_gamma(
    cube: *const HsivisCube,
    lab: *const HsivisImage,
    pair_budget: size_t,
    seed: u64,
    gamma_out: *mut f64,
) -> HsivisStatus {
    guard(|| {
        if gamma_out.is_null() {
            return Err(null("gamma_out"));
        }
        let budget = if pair_budget == 0 { PairBudget::All } else { PairBudget::Count(pair_budget) };
        *gamma_out = metrics::preservation_of_distance(&borrow(cube, "cube")?.0, &borrow(lab, "lab")?.0, budget, seed)?;
        Ok(())
    })
}

/// Least-squares homography through `count` point pairs given as interleaved
/// `x, y` coordinates. Writes 9 row-major values to `h_out`.
///
/// # Safety
/// `src` and `dst` must hold `2 * count` doubles and `h_out` room for 9.
#[no_mangle]
pub unsafe extern "C" fn hsivis_homography_fit(
    src: *const f64,
    dst: *const f64,
    count: size_t,
    h_out: *mut f64,
) -> HsivisStatus {
    guard(|| {
        let h = correspondence::fit_homography(&points(src, count, "src")?, &points(dst, count, "dst")?)?;
        put_homography(&h, h_out)
    })
}

/// Seeded RANSAC over `count` point pairs. `inliers_out`, when not null,
/// receives one 0/1 byte per pair; `inlier_count_out` may be null.
///
/// # Safety
/// `src` and `dst` must hold `2 * count` doubles, `h_out` room for 9 and
/// `inliers_out` room for `count` bytes.
#[no_mangle]
pub unsafe extern "C" fn hsivis_homography_ransac(
    src: *const f64,
    dst: *const f64,
    count: size_t,
    inlier_px: f64,
    iters: size_t,
    seed: u64,
    h_out: *mut f64,
    inliers_out: *mut u8,
    inlier_count_out: *mut size_t,
) -> HsivisStatus {
    guard(|| {
        let fit = correspondence::ransac_homography(
            &points(src, count, "src")?,
            &points(dst, count, "dst")?,
            inlier_px,
            iters,
            seed,
        )?;
        put_homography(&fit.homography, h_out)?;
        if !inliers_out.is_null() {
            for (k, &b) in fit.inliers.iter().enumerate() {
                *inliers_out.add(k) = u8::from(b);
            }
        }
        put_value(inlier_count_out, fit.inlier_count());
        Ok(())
    })
}
