#ifndef HSIVIS_H
#define HSIVIS_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  HSIVIS_STATUS_OK = 0,
  HSIVIS_STATUS_NULL_POINTER = 1,
  HSIVIS_STATUS_INVALID_ARGUMENT = 2,
  HSIVIS_STATUS_IO = 3,
  HSIVIS_STATUS_FORMAT = 4,
  HSIVIS_STATUS_DIMENSION_MISMATCH = 5,
  HSIVIS_STATUS_SINGULAR = 6,
  HSIVIS_STATUS_UNCONSTRAINED = 7,
  HSIVIS_STATUS_NO_CONSENSUS = 8,
  HSIVIS_STATUS_UNDEFINED_METRIC = 9,
  HSIVIS_STATUS_BUFFER_TOO_SMALL = 10,
  HSIVIS_STATUS_PANIC = 11,
} HsivisStatus;

typedef enum {
  HSIVIS_COLOR_SPACE_RGB = 0,
  HSIVIS_COLOR_SPACE_LAB = 1,
} HsivisColorSpace;

typedef struct HsivisCorrespondence HsivisCorrespondence;

typedef struct HsivisCube HsivisCube;

typedef struct HsivisGraph HsivisGraph;

typedef struct HsivisImage HsivisImage;

typedef struct HsivisProjection HsivisProjection;

/**
 * Graph construction settings. A non-positive `delta_s` or `delta_w` asks for
 * median bandwidths estimated with `bandwidth_seed`.
 */
typedef struct {
  size_t k;
  double mu;
  double delta_s;
  double delta_w;
  size_t spatial_radius;
  double spatial_sigma;
  uint64_t bandwidth_seed;
} HsivisGraphParams;

/**
 * Solver settings. `lambda <= 0` selects the automatic rule and
 * `cg_max_iter == 0` the default cap.
 */
typedef struct {
  double lambda;
  double cg_tol;
  size_t cg_max_iter;
  double ridge;
  bool jacobi;
} HsivisSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hsivis_last_error_message(void);

HsivisGraphParams hsivis_graph_params_default(void);

HsivisSolveOptions hsivis_solve_options_default(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable handle slot.
 */
HsivisStatus hsivis_cube_read(const char *path, HsivisCube **out);

/**
 * # Safety
 * `cube` must be a live handle and `path` a NUL-terminated string.
 */
HsivisStatus hsivis_cube_write(const HsivisCube *cube, const char *path);

/**
 * Copies `height * width * bands` values from `data`.
 *
 * # Safety
 * `data` must point to that many readable doubles.
 */
HsivisStatus hsivis_cube_from_data(size_t height,
                                   size_t width,
                                   size_t bands,
                                   const double *data,
                                   HsivisCube **out);

/**
 * # Safety
 * `cube` must be a live handle; null output pointers are skipped.
 */
HsivisStatus hsivis_cube_dims(const HsivisCube *cube, size_t *height, size_t *width, size_t *bands);

/**
 * # Safety
 * `out` must have room for `len` doubles.
 */
HsivisStatus hsivis_cube_copy_data(const HsivisCube *cube, double *out, size_t len);

/**
 * # Safety
 * `cube` must be null or a handle not yet freed.
 */
void hsivis_cube_free(HsivisCube *cube);

/**
 * Reads a binary PPM as an RGB image with channels in `[0, 1]`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable handle slot.
 */
HsivisStatus hsivis_image_read(const char *path, HsivisImage **out);

/**
 * Writes an RGB image as a binary PPM.
 *
 * # Safety
 * `image` must be a live handle and `path` a NUL-terminated string.
 */
HsivisStatus hsivis_image_write(const HsivisImage *image, const char *path);

/**
 * Copies `3 * height * width` values from `data`.
 *
 * # Safety
 * `data` must point to that many readable doubles.
 */
HsivisStatus hsivis_image_from_data(HsivisColorSpace space,
                                    size_t height,
                                    size_t width,
                                    const double *data,
                                    HsivisImage **out);

/**
 * # Safety
 * `image` must be a live handle; null output pointers are skipped.
 */
HsivisStatus hsivis_image_dims(const HsivisImage *image,
                               size_t *height,
                               size_t *width,
                               HsivisColorSpace *space);

/**
 * # Safety
 * `out` must have room for `len` doubles.
 */
HsivisStatus hsivis_image_copy_data(const HsivisImage *image, double *out, size_t len);

/**
 * # Safety
 * `image` must be a live RGB handle and `out` a writable handle slot.
 */
HsivisStatus hsivis_image_rgb_to_lab(const HsivisImage *image, HsivisImage **out);

/**
 * # Safety
 * `image` must be a live Lab handle and `out` a writable handle slot.
 */
HsivisStatus hsivis_image_lab_to_rgb(const HsivisImage *image, HsivisImage **out);

/**
 * # Safety
 * `image` must be null or a handle not yet freed.
 */
void hsivis_image_free(HsivisImage *image);

/**
 * # Safety
 * `cube` and `params` must be valid and `out` a writable handle slot.
 */
HsivisStatus hsivis_graph_build(const HsivisCube *cube,
                                const HsivisGraphParams *params,
                                HsivisGraph **out);

/**
 * Number of undirected edges, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t hsivis_graph_edge_count(const HsivisGraph *graph);

/**
 * # Safety
 * `graph` must be null or a handle not yet freed.
 */
void hsivis_graph_free(HsivisGraph *graph);

/**
 * Pairs `ceil(fraction * n)` seeded pixels with the same index in an aligned reference.
 *
 * # Safety
 * `out` must be a writable handle slot.
 */
HsivisStatus hsivis_correspondence_sample_aligned(size_t n,
                                                  double fraction,
                                                  uint64_t seed,
                                                  HsivisCorrespondence **out);

/**
 * Reads a `hsi_row,hsi_col,ref_row,ref_col` pairs file.
 *
 * # Safety
 * `cube` and `reference` must be live handles and `path` a NUL-terminated string.
 */
HsivisStatus hsivis_correspondence_read(const char *path,
                                        const HsivisCube *cube,
                                        const HsivisImage *reference,
                                        HsivisCorrespondence **out);

/**
 * Number of distinct pairs, or 0 for a null handle.
 *
 * # Safety
 * `corr` must be null or a live handle.
 */
size_t hsivis_correspondence_len(const HsivisCorrespondence *corr);

/**
 * # Safety
 * `corr` must be null or a handle not yet freed.
 */
void hsivis_correspondence_free(HsivisCorrespondence *corr);

/**
 * Solves for every pixel's color. `reference_lab` must be a Lab image; the
 * result is a Lab image on the cube's grid. `lambda_out` and `converged_out`
 * may be null.
 *
 * # Safety
 * All handles must be live and `out` a writable handle slot.
 */
HsivisStatus hsivis_solve_instance(const HsivisCube *cube,
                                   const HsivisGraph *graph,
                                   const HsivisCorrespondence *corr,
                                   const HsivisImage *reference_lab,
                                   const HsivisSolveOptions *options,
                                   HsivisImage **out,
                                   double *lambda_out,
                                   bool *converged_out);

/**
 * Learns a `bands x 3` projection. `lambda_out` may be null.
 *
 * # Safety
 * All handles must be live and `out` a writable handle slot.
 */
HsivisStatus hsivis_solve_feature(const HsivisCube *cube,
                                  const HsivisGraph *graph,
                                  const HsivisCorrespondence *corr,
                                  const HsivisImage *reference_lab,
                                  const HsivisSolveOptions *options,
                                  HsivisProjection **out,
                                  double *lambda_out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable handle slot.
 */
HsivisStatus hsivis_projection_read(const char *path, HsivisProjection **out);

/**
 * # Safety
 * `projection` must be a live handle and `path` a NUL-terminated string.
 */
HsivisStatus hsivis_projection_write(const HsivisProjection *projection, const char *path);

/**
 * Number of source bands, or 0 for a null handle.
 *
 * # Safety
 * `projection` must be null or a live handle.
 */
size_t hsivis_projection_bands(const HsivisProjection *projection);

/**
 * Copies the `bands x 3` weights column-major.
 *
 * # Safety
 * `out` must have room for `len` doubles.
 */
HsivisStatus hsivis_projection_copy_weights(const HsivisProjection *projection,
                                            double *out,
                                            size_t len);

/**
 * Projects a cube to a Lab image.
 *
 * # Safety
 * Both handles must be live and `out` a writable handle slot.
 */
HsivisStatus hsivis_projection_apply(const HsivisProjection *projection,
                                     const HsivisCube *cube,
                                     HsivisImage **out);

/**
 * # Safety
 * `projection` must be null or a handle not yet freed.
 */
void hsivis_projection_free(HsivisProjection *projection);

/**
 * Preservation-of-distance correlation between a cube and a Lab image on the
 * same grid. `pair_budget == 0` uses every pixel pair.
 *
 * # Safety
 * Both handles must be live and `gamma_out` writable.
 */
HsivisStatus hsivis_gamma(const HsivisCube *cube,
                          const HsivisImage *lab,
                          size_t pair_budget,
                          uint64_t seed,
                          double *gamma_out);

/**
 * Least-squares homography through `count` point pairs given as interleaved
 * `x, y` coordinates. Writes 9 row-major values to `h_out`.
 *
 * # Safety
 * `src` and `dst` must hold `2 * count` doubles and `h_out` room for 9.
 */
HsivisStatus hsivis_homography_fit(const double *src,
                                   const double *dst,
                                   size_t count,
                                   double *h_out);

/**
 * Seeded RANSAC over `count` point pairs. `inliers_out`, when not null,
 * receives one 0/1 byte per pair; `inlier_count_out` may be null.
 *
 * # Safety
 * `src` and `dst` must hold `2 * count` doubles, `h_out` room for 9 and
 * `inliers_out` room for `count` bytes.
 */
HsivisStatus hsivis_homography_ransac(const double *src,
                                      const double *dst,
                                      size_t count,
                                      double inlier_px,
                                      size_t iters,
                                      uint64_t seed,
                                      double *h_out,
                                      uint8_t *inliers_out,
                                      size_t *inlier_count_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HSIVIS_H */
