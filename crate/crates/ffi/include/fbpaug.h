#ifndef FBPAUG_H
#define FBPAUG_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum FbpaugStatus {
  FBPAUG_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  FBPAUG_STATUS_NULL_POINTER = 1,
  /**
   * A parameter is out of range (kernel `a < -1`, `b <= 0`, width <= 0, ...).
   */
  FBPAUG_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Non-finite values, zero dimensions or a non-square image where a
   * square one is required.
   */
  FBPAUG_STATUS_INVALID_IMAGE = 3,
  FBPAUG_STATUS_DIMENSION_MISMATCH = 4,
  /**
   * Malformed augmentation config.
   */
  FBPAUG_STATUS_CONFIG = 5,
  FBPAUG_STATUS_IO = 6,
  FBPAUG_STATUS_BAD_MAGIC = 7,
  FBPAUG_STATUS_TRUNCATED = 8,
  FBPAUG_STATUS_UNKNOWN_KIND = 9,
  FBPAUG_STATUS_BAD_HEADER = 10,
  /**
   * A statistic is undefined for the input (empty or degenerate).
   */
  FBPAUG_STATUS_DEGENERATE = 11,
  /**
   * An internal panic was caught at the boundary.
   */
  FBPAUG_STATUS_PANIC = 12,
} FbpaugStatus;

/**
 * Opaque image handle.
 */
typedef struct FbpaugImage FbpaugImage;

/**
 * Opaque sinogram handle.
 */
typedef struct FbpaugSinogram FbpaugSinogram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or an empty
 * string after a success. Valid until the next call on the same thread.
 */
const char *fbpaug_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fbpaug_version(void);

/**
 * Creates an image from `height * width` row-major values (copied).
 */
enum FbpaugStatus fbpaug_image_new(size_t height,
                                   size_t width,
                                   double spacing_y,
                                   double spacing_x,
                                   const double *values,
                                   struct FbpaugImage **out);

/**
 * Releases an image; null is ignored.
 */
void fbpaug_image_free(struct FbpaugImage *image);

/**
 * Height in pixels, or 0 for a null handle.
 */
size_t fbpaug_image_height(const struct FbpaugImage *image);

/**
 * Width in pixels, or 0 for a null handle.
 */
size_t fbpaug_image_width(const struct FbpaugImage *image);

enum FbpaugStatus fbpaug_image_spacing(const struct FbpaugImage *image,
                                       double *spacing_y,
                                       double *spacing_x);

/**
 * Copies the row-major values into `out`, which must hold exactly
 * `height * width` doubles.
 */
enum FbpaugStatus fbpaug_image_copy_values(const struct FbpaugImage *image,
                                           double *out,
                                           size_t len);

/**
 * Reads an image or mask RIMG file (masks become 0/1 images).
 */
enum FbpaugStatus fbpaug_image_read(const char *path, struct FbpaugImage **out);

/**
 * Writes an image as a RIMG file.
 */
enum FbpaugStatus fbpaug_image_write(const struct FbpaugImage *image, const char *path);

/**
 * Creates a sinogram from `n_angles * n_detectors` values (copied);
 * `n_detectors` must be odd.
 */
enum FbpaugStatus fbpaug_sinogram_new(size_t n_angles,
                                      size_t n_detectors,
                                      double det_spacing,
                                      const double *values,
                                      struct FbpaugSinogram **out);

void fbpaug_sinogram_free(struct FbpaugSinogram *sinogram);

size_t fbpaug_sinogram_n_angles(const struct FbpaugSinogram *sinogram);

size_t fbpaug_sinogram_n_detectors(const struct FbpaugSinogram *sinogram);

/**
 * Detector pitch in mm, or 0 for a null handle.
 */
double fbpaug_sinogram_det_spacing(const struct FbpaugSinogram *sinogram);

enum FbpaugStatus fbpaug_sinogram_copy_values(const struct FbpaugSinogram *sinogram,
                                              double *out,
                                              size_t len);

/**
 * Parallel-beam projection of a square image over `n_angles` angles in
 * `[0, pi)`.
 */
enum FbpaugStatus fbpaug_radon(const struct FbpaugImage *image,
                               size_t n_angles,
                               struct FbpaugSinogram **out);

/**
 * Filtered back-projection with kernel `|w|(1 + a*w^b)`; `a = 0` is the
 * plain ramp filter.
 */
enum FbpaugStatus fbpaug_fbp(const struct FbpaugSinogram *sinogram,
                             double a,
                             double b,
                             struct FbpaugImage **out);

/**
 * Re-reconstructs `image` with kernel `(a, b)`; `n_angles = 0` uses the
 * padded side length.
 */
enum FbpaugStatus fbpaug_fbpaug(const struct FbpaugImage *image,
                                double a,
                                double b,
                                size_t n_angles,
                                struct FbpaugImage **out);

enum FbpaugStatus fbpaug_gamma(const struct FbpaugImage *image,
                               double gamma,
                               struct FbpaugImage **out);

/**
 * Adds Gaussian noise drawn from stream `(seed, index)`. With `raw = 0` the
 * noise is applied on min-max normalised intensities.
 */
enum FbpaugStatus fbpaug_noise(const struct FbpaugImage *image,
                               double sigma,
                               bool raw,
                               uint64_t seed,
                               uint64_t index,
                               struct FbpaugImage **out);

enum FbpaugStatus fbpaug_windowing(const struct FbpaugImage *image,
                                   double center,
                                   double width,
                                   struct FbpaugImage **out);

/**
 * Full sampled augmentation for item `index`, identical to the CLI batch
 * item with the same seed. `config_toml` is a flat TOML config (null or
 * empty for defaults); its `seed` key is replaced by `seed`.
 */
enum FbpaugStatus fbpaug_transform(const struct FbpaugImage *image,
                                   const char *config_toml,
                                   uint64_t seed,
                                   uint64_t index,
                                   struct FbpaugImage **out);

/**
 * Dice overlap of two masks stored as 0/1 images of the same shape.
 */
enum FbpaugStatus fbpaug_dice(const struct FbpaugImage *mask_a,
                              const struct FbpaugImage *mask_b,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FBPAUG_H */
