#ifndef MAF_H
#define MAF_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MafNormalization {
  MAF_NORMALIZATION_RAW = 0,
  MAF_NORMALIZATION_EGO_SCALE = 1,
} MafNormalization;

typedef enum MafStatus {
  MAF_STATUS_OK = 0,
  // A required pointer argument was NULL.
  MAF_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  MAF_STATUS_INVALID_UTF8 = 2,
  // Missing or malformed input data.
  MAF_STATUS_INPUT_ERROR = 3,
  // Invalid configuration or violated precondition.
  MAF_STATUS_CONFIG_ERROR = 4,
  // The output buffer is too small; the required length was still written.
  MAF_STATUS_BUFFER_TOO_SMALL = 5,
  // The library panicked; this is a bug.
  MAF_STATUS_PANIC = 6,
} MafStatus;

// A loaded query directory.
typedef struct MafQuery MafQuery;

typedef struct MafConfig {
  size_t window_length;
  size_t window_stride;
  enum MafNormalization normalization;
  double lambda_trust;
} MafConfig;

typedef struct MafFrameMotion {
  double t_i;
  double r_i;
} MafFrameMotion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *maf_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *maf_last_error(void);

// Default pipeline configuration.
struct MafConfig maf_config_default(void);

// Loads the query directory `dir`. On success `*out` owns a new handle.
//
// # Safety
// `dir` must be a NUL-terminated string and `out` a valid pointer.
enum MafStatus maf_query_load(const char *dir, struct MafQuery **out);

// Releases a handle from [`maf_query_load`]. NULL is ignored.
//
// # Safety
// `query` must be NULL or a live handle not freed before.
void maf_query_free(struct MafQuery *query);

// # Safety
// `query` and `out` must be valid pointers.
enum MafStatus maf_query_candidate_count(const struct MafQuery *query, size_t *out);

// Copies the id of candidate `index` into `buf` with a trailing NUL.
// `*out_len` receives the id length without the NUL, also when the buffer
// is too small.
//
// # Safety
// `buf` must hold `capacity` bytes; `query` and `out_len` must be valid.
enum MafStatus maf_query_candidate_id(const struct MafQuery *query,
                                      size_t index,
                                      char *buf,
                                      size_t capacity,
                                      size_t *out_len);

// Runs the full pipeline. `config` may be NULL for defaults. `*out_index`
// receives the predicted candidate position.
//
// # Safety
// `query` and `out_index` must be valid; `config` NULL or valid.
enum MafStatus maf_identify(const struct MafQuery *query,
                            const struct MafConfig *config,
                            size_t *out_index);

// Per-frame motion signals from row-major rasters of `width * height`
// values. Flow components above 1e9 in magnitude or non-finite, and
// non-positive depths, mark a pixel invalid.
//
// # Safety
// `fx`, `fy` and `z` must each hold `width * height` values.
enum MafStatus maf_frame_motion(size_t width,
                                size_t height,
                                const double *fx,
                                const double *fy,
                                const double *z,
                                struct MafFrameMotion *out);

// Confidence of a score list weighted by `lambda_trust * alpha_mask`. May be
// +infinity.
//
// # Safety
// `scores` must hold `n` values; `out` must be valid.
enum MafStatus maf_confidence(const double *scores,
                              size_t n,
                              double lambda_trust,
                              double alpha_mask,
                              double *out);

// Fuses motion scores for `n` candidates with `m` appearance sources.
// `appearance` is row-major `m x n`; `lambdas` and `alphas` hold `m`
// values each.
//
// # Safety
// Arrays must have the stated lengths; `out_index` must be valid.
enum MafStatus maf_fuse(const double *motion,
                        size_t n,
                        const double *appearance,
                        const double *lambdas,
                        const double *alphas,
                        size_t m,
                        size_t *out_index);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAF_H */
