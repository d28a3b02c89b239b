#ifndef BIXELQ_H
#define BIXELQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Values above 2 match the CLI exit codes.
typedef enum BqStatus {
  BQ_STATUS_OK = 0,
  BQ_STATUS_INTERNAL = 1,
  BQ_STATUS_NULL_POINTER = 2,
  BQ_STATUS_FILE_NOT_FOUND = 3,
  BQ_STATUS_UNSUPPORTED_FORMAT = 4,
  BQ_STATUS_CORRUPT_IMAGE = 5,
  BQ_STATUS_IO = 6,
  BQ_STATUS_INVALID_PARAMETER = 7,
  BQ_STATUS_DIMENSION_MISMATCH = 8,
  BQ_STATUS_EMPTY_INPUT = 9,
  BQ_STATUS_INDEX_OUT_OF_RANGE = 10,
  BQ_STATUS_NORM_VIOLATION = 11,
  BQ_STATUS_INVALID_DISTRIBUTION = 12,
  BQ_STATUS_NEGATIVE_MSE = 13,
  BQ_STATUS_ZERO_SHOTS = 14,
  BQ_STATUS_MALFORMED = 15,
} BqStatus;

typedef enum BqBackend {
  BQ_BACKEND_IDEAL = 0,
  BQ_BACKEND_SAMPLED = 1,
} BqBackend;

typedef enum BqBinRange {
  BQ_BIN_RANGE_DATA = 0,
  BQ_BIN_RANGE_FULL = 1,
} BqBinRange;

typedef enum BqReconMode {
  BQ_RECON_MODE_PAPER = 0,
  BQ_RECON_MODE_MEASURED = 1,
} BqReconMode;

typedef enum BqScheme {
  BQ_SCHEME_FRQI = 0,
  BQ_SCHEME_NEQR = 1,
  BQ_SCHEME_NCQI = 2,
  BQ_SCHEME_PROPOSED = 3,
} BqScheme;

// Opaque normalized image.
typedef struct BqImage BqImage;

// Opaque result of one compression run.
typedef struct BqRun BqRun;

typedef struct BqConfig {
  uint32_t bixel_h;
  uint32_t bixel_w;
  uint32_t bins;
  enum BqBackend backend;
  uint64_t shots;
  uint64_t seed;
  enum BqBinRange bin_range;
  enum BqReconMode recon;
} BqConfig;

typedef struct BqFidelity {
  double mse;
  // `INFINITY` for a perfect reconstruction.
  double psnr_db;
  // Total variation distance; only meaningful when `has_tvd` is 1.
  double tvd;
  uint8_t has_tvd;
  uint64_t clip_count;
  uint32_t qubits;
  double mse_bound;
  double embed_s;
  double recon_s;
} BqFidelity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call that fails on the same thread.
const char *bq_last_error_message(void);

// Stable kebab-case name of a status code; never null.
const char *bq_status_name(enum BqStatus status);

// 32×32 bixels, 32 bins, sampled backend with 4096 shots and seed 0.
struct BqConfig bq_config_default(void);

// Loads a PNG, PGM or PPM file.
//
// # Safety
// `path` must be a nul-terminated string and `out` a valid pointer.
enum BqStatus bq_image_load(const char *path, struct BqImage **out);

// Wraps `height × width × channels` 8-bit samples, row-major with
// interleaved channels.
//
// # Safety
// `data` must point to `len` readable bytes and `out` must be valid.
enum BqStatus bq_image_from_u8(const uint8_t *data,
                               size_t len,
                               uint32_t height,
                               uint32_t width,
                               uint32_t channels,
                               struct BqImage **out);

// # Safety
// `image` must be a live handle; output pointers may be null.
enum BqStatus bq_image_dims(const struct BqImage *image,
                            uint32_t *height,
                            uint32_t *width,
                            uint32_t *channels);

// Copies the image as 8-bit samples (`round(v × 255)`).
//
// # Safety
// `image` must be live and `buf` must have room for `len` bytes.
enum BqStatus bq_image_copy_u8(const struct BqImage *image, uint8_t *buf, size_t len);

// Writes a PNG; the file size goes to `out_bytes` when non-null.
//
// # Safety
// `image` must be live, `path` nul-terminated.
enum BqStatus bq_image_save_png(const struct BqImage *image, const char *path, uint64_t *out_bytes);

// # Safety
// `image` must come from this library and not be freed twice. Null is a
// no-op.
void bq_image_free(struct BqImage *image);

// Runs the full pipeline on `image`.
//
// # Safety
// `image` and `config` must be valid; `out` receives a new handle.
enum BqStatus bq_compress(const struct BqImage *image,
                          const struct BqConfig *config,
                          struct BqRun **out);

// # Safety
// `run` must be live and `out` valid.
enum BqStatus bq_run_fidelity(const struct BqRun *run, struct BqFidelity *out);

// Copies the `B` histogram counts. Pass a null `buf` to query the length
// through `written`.
//
// # Safety
// `run` must be live; `buf` must hold `len` entries when non-null.
enum BqStatus bq_run_histogram_counts(const struct BqRun *run,
                                      uint64_t *buf,
                                      size_t len,
                                      size_t *written);

// Copies the `B + 1` bin edges.
//
// # Safety
// As for [`bq_run_histogram_counts`].
enum BqStatus bq_run_bin_edges(const struct BqRun *run, double *buf, size_t len, size_t *written);

// Copies the `2^n` ideal measurement probabilities.
//
// # Safety
// As for [`bq_run_histogram_counts`].
enum BqStatus bq_run_probabilities(const struct BqRun *run,
                                   double *buf,
                                   size_t len,
                                   size_t *written);

// Copies the per-block reconstructed sums.
//
// # Safety
// As for [`bq_run_histogram_counts`].
enum BqStatus bq_run_reconstructed_sums(const struct BqRun *run,
                                        double *buf,
                                        size_t len,
                                        size_t *written);

// New image handle holding the reconstruction.
//
// # Safety
// `run` must be live and `out` valid.
enum BqStatus bq_run_reconstructed_image(const struct BqRun *run, struct BqImage **out);

// # Safety
// `run` must come from [`bq_compress`] and not be freed twice. Null is a
// no-op.
void bq_run_free(struct BqRun *run);

// `ceil(log2(bins))`.
//
// # Safety
// `out` must be valid.
enum BqStatus bq_required_qubits(uint64_t bins, uint32_t *out);

// Qubits needed by `scheme` for `n_pixels` pixels. `param` is the NEQR bit
// depth or the PROPOSED bin count and is ignored otherwise.
//
// # Safety
// `out` must be valid.
enum BqStatus bq_qubit_accounting(uint64_t n_pixels,
                                  enum BqScheme scheme,
                                  uint64_t param,
                                  uint32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIXELQ_H */
