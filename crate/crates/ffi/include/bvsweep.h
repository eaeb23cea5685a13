/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef BVSWEEP_H
#define BVSWEEP_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes. Values 0 to 6 coincide with the exit codes of the
 * `bvsweep` command line tool.
 */
typedef enum BvStatus {
  BV_STATUS_OK = 0,
  /**
   * The sweep finished but a gating check failed; the run handle is valid.
   */
  BV_STATUS_CHECK_FAILED = 1,
  BV_STATUS_BAD_CONFIG = 2,
  BV_STATUS_SOLVER_STALL = 3,
  /**
   * The sweep finished without Cauchy convergence; the run handle is valid.
   */
  BV_STATUS_NOT_CONVERGED = 4,
  BV_STATUS_IO = 5,
  BV_STATUS_NUMERICAL = 6,
  BV_STATUS_NULL_POINTER = 7,
  BV_STATUS_INVALID_UTF8 = 8,
  BV_STATUS_OUT_OF_RANGE = 9,
  BV_STATUS_BUFFER_TOO_SMALL = 10,
  BV_STATUS_PANIC = 11,
} BvStatus;

/**
 * Opaque run configuration.
 */
typedef struct BvConfig BvConfig;

/**
 * Opaque result of a finished sweep.
 */
typedef struct BvRun BvRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *bv_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void bv_string_free(char *s);

/**
 * Configuration for a built-in scenario with its default ladder and mesh.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BvStatus bv_config_scenario(const char *name, struct BvConfig **out);

/**
 * Parses configuration text (grammar in `docs/config.ebnf`).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BvStatus bv_config_parse(const char *text, struct BvConfig **out);

/**
 * Replaces the viscosity ladder. Validated when the run starts.
 *
 * # Safety
 * `cfg` must be a live handle and `eps` must point to `len` doubles.
 */
enum BvStatus bv_config_set_eps(struct BvConfig *cfg, const double *eps, uintptr_t len);

/**
 * Uses a uniform partition with `steps` steps at every viscosity.
 *
 * # Safety
 * `cfg` must be a live handle.
 */
enum BvStatus bv_config_set_steps(struct BvConfig *cfg, uintptr_t steps);

/**
 * # Safety
 * `cfg` must be a live handle.
 */
enum BvStatus bv_config_set_seed(struct BvConfig *cfg, uint64_t seed);

/**
 * Directory that receives the CSV and JSON artifacts.
 *
 * # Safety
 * `cfg` must be a live handle and `dir` a NUL-terminated string.
 */
enum BvStatus bv_config_set_out(struct BvConfig *cfg, const char *dir);

/**
 * # Safety
 * `cfg` must be null or a handle from this library, not used afterwards.
 */
void bv_config_free(struct BvConfig *cfg);

/**
 * Solves, sweeps and certifies, writing artifacts to the configured
 * directory. On `Ok`, `CheckFailed` and `NotConverged` `*out` receives a run
 * handle; on any other status it is null.
 *
 * # Safety
 * `cfg` must be a live handle and `out` a valid pointer.
 */
enum BvStatus bv_run(const struct BvConfig *cfg, struct BvRun **out);

/**
 * State dimension of the solved problem.
 *
 * # Safety
 * `run` must be a live handle and `dim` a valid pointer.
 */
enum BvStatus bv_run_dim(const struct BvRun *run, uintptr_t *dim);

/**
 * Number of viscosity levels; the last one is the limit candidate.
 *
 * # Safety
 * `run` must be a live handle and `levels` a valid pointer.
 */
enum BvStatus bv_run_levels(const struct BvRun *run, uintptr_t *levels);

/**
 * Viscosity of level `level`.
 *
 * # Safety
 * `run` must be a live handle and `eps` a valid pointer.
 */
enum BvStatus bv_run_eps(const struct BvRun *run, uintptr_t level, double *eps);

/**
 * Copies the final discrete state of level `level` into `buf`, which must
 * hold at least `bv_run_dim` doubles.
 *
 * # Safety
 * `run` must be a live handle and `buf` must point to `len` writable doubles.
 */
enum BvStatus bv_run_final_state(const struct BvRun *run,
                                 uintptr_t level,
                                 double *buf,
                                 uintptr_t len);

/**
 * Whether every gating check passed.
 *
 * # Safety
 * `run` must be a live handle and `pass` a valid pointer.
 */
enum BvStatus bv_run_pass(const struct BvRun *run, bool *pass);

/**
 * The full report as JSON; release with [`bv_string_free`].
 *
 * # Safety
 * `run` must be a live handle and `json` a valid pointer.
 */
enum BvStatus bv_run_report_json(const struct BvRun *run, char **json);

/**
 * # Safety
 * `run` must be null or a handle from this library, not used afterwards.
 */
void bv_run_free(struct BvRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BVSWEEP_H */
