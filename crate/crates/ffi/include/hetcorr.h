#ifndef HETCORR_H
#define HETCORR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_UTF8 = 2,
  HC_STATUS_CONFIG = 3,
  HC_STATUS_PARAMETER_DOMAIN = 4,
  HC_STATUS_SINGULAR_GEOMETRY = 5,
  HC_STATUS_RUNTIME = 6,
  HC_STATUS_BUFFER_TOO_SMALL = 7,
  HC_STATUS_PANIC = 8,
} HcStatus;

/**
 * Parsed run configuration.
 */
typedef struct HcConfig HcConfig;

/**
 * CSV document produced by [`hc_run`].
 */
typedef struct HcCsv HcCsv;

/**
 * Sampled point pattern.
 */
typedef struct HcPattern HcPattern;

/**
 * Axis-aligned sampling window.
 */
typedef struct HcWindow {
  double x_min;
  double x_max;
  double y_min;
  double y_max;
} HcWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL if none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *hc_last_error_message(void);

/**
 * Parses a `key = value` configuration document (NUL-terminated UTF-8).
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum HcStatus hc_config_parse(const char *text, struct HcConfig **out);

/**
 * # Safety
 * `config` must come from [`hc_config_parse`] or be NULL.
 */
void hc_config_free(struct HcConfig *config);

/**
 * # Safety
 * `config` must be a live handle.
 */
enum HcStatus hc_config_set_seed(struct HcConfig *config, uint64_t seed);

/**
 * Sets the worker-thread count (0 = one per core).
 *
 * # Safety
 * `config` must be a live handle.
 */
enum HcStatus hc_config_set_threads(struct HcConfig *config, size_t threads);

/**
 * Runs the configured experiment; the CSV is returned in a new handle.
 * The config's `out` path is ignored.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum HcStatus hc_run(const struct HcConfig *config, struct HcCsv **out);

/**
 * NUL-terminated CSV text owned by the handle.
 *
 * # Safety
 * `csv` must be a live handle.
 */
const char *hc_csv_data(const struct HcCsv *csv);

/**
 * Length of the CSV text in bytes, excluding the terminator.
 *
 * # Safety
 * `csv` must be a live handle or NULL.
 */
size_t hc_csv_len(const struct HcCsv *csv);

/**
 * # Safety
 * `csv` must come from [`hc_run`] or be NULL.
 */
void hc_csv_free(struct HcCsv *csv);

/**
 * `max(distance, r0)^(-alpha)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HcStatus hc_path_loss(double distance, double alpha, double r0, double *out);

/**
 * Fading- and ALOHA-averaged success probability of a link of length `d`
 * to a receiver at the origin, given `n` unit-power interferers at
 * `(xs[i], ys[i])`. `aloha_p = 1` means always on.
 *
 * # Safety
 * `xs` and `ys` must each point to `n` doubles (or be NULL when `n == 0`);
 * `out` must be a valid pointer.
 */
enum HcStatus hc_conditional_success_rayleigh(double d,
                                              double theta,
                                              const double *xs,
                                              const double *ys,
                                              size_t n,
                                              double alpha,
                                              double r0,
                                              double noise,
                                              double aloha_p,
                                              double *out);

/**
 * Homogeneous PPP sample from substream `stream` of `seed`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HcStatus hc_sample_ppp(double lambda,
                            struct HcWindow window,
                            uint64_t seed,
                            uint64_t stream,
                            struct HcPattern **out);

/**
 * Matérn type-II hard-core sample.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HcStatus hc_sample_matern_hardcore(double lambda_parent,
                                        double r_min,
                                        struct HcWindow window,
                                        uint64_t seed,
                                        uint64_t stream,
                                        struct HcPattern **out);

/**
 * Thomas cluster sample.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HcStatus hc_sample_thomas(double lambda_parent,
                               double mean_daughters,
                               double sigma,
                               struct HcWindow window,
                               uint64_t seed,
                               uint64_t stream,
                               struct HcPattern **out);

/**
 * # Safety
 * `pattern` must be a live handle or NULL.
 */
size_t hc_pattern_len(const struct HcPattern *pattern);

/**
 * Copies the points as interleaved `x, y` pairs into `xy`, which holds
 * room for `capacity` points. `written` receives the number of points.
 *
 * # Safety
 * `pattern` must be a live handle, `xy` must hold `2 * capacity` doubles
 * and `written` must be a valid pointer.
 */
enum HcStatus hc_pattern_copy_points(const struct HcPattern *pattern,
                                     double *xy,
                                     size_t capacity,
                                     size_t *written);

/**
 * # Safety
 * `pattern` must come from an `hc_sample_*` call or be NULL.
 */
void hc_pattern_free(struct HcPattern *pattern);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HETCORR_H */
