#ifndef BOUSSINESQ_H
#define BOUSSINESQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum BsqStatus {
  BSQ_STATUS_OK = 0,
  BSQ_STATUS_NULL_POINTER = 1,
  BSQ_STATUS_INVALID_UTF8 = 2,
  BSQ_STATUS_INVALID_ARGUMENT = 3,
  BSQ_STATUS_CONFIG = 4,
  BSQ_STATUS_IO = 5,
  /**
   * The implicit step did not converge.
   */
  BSQ_STATUS_DIVERGED = 6,
  /**
   * A campaign finished but more paths failed than tolerated.
   */
  BSQ_STATUS_TOLERANCE_EXCEEDED = 7,
  /**
   * Any other library error.
   */
  BSQ_STATUS_FAILED = 8,
  BSQ_STATUS_PANIC = 9,
} BsqStatus;

/**
 * Experiment kinds for [`bsq_run_campaign`].
 */
typedef enum BsqCampaign {
  BSQ_CAMPAIGN_SIMULATE = 0,
  BSQ_CAMPAIGN_CONVERGE = 1,
  BSQ_CAMPAIGN_MOMENTS = 2,
  BSQ_CAMPAIGN_INCREMENTS = 3,
} BsqCampaign;

/**
 * A parsed and validated experiment configuration.
 */
typedef struct BsqConfig BsqConfig;

/**
 * One trajectory on the reference mesh, advanced on demand.
 */
typedef struct BsqSimulation BsqSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or an empty
 * string. Valid until the next call into the library on this thread.
 */
const char *bsq_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bsq_version(void);

/**
 * Parses a TOML experiment document.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BsqStatus bsq_config_parse(const char *toml, struct BsqConfig **out);

/**
 * Loads a TOML experiment file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BsqStatus bsq_config_load(const char *path, struct BsqConfig **out);

/**
 * Grid points per dimension `K` and the reference step count.
 *
 * # Safety
 * All pointers must be valid; `config` must come from this library.
 */
enum BsqStatus bsq_config_shape(const struct BsqConfig *config,
                                size_t *modes,
                                size_t *reference_steps);

/**
 * Releases a configuration. Null is ignored.
 *
 * # Safety
 * `config` must be null or come from `bsq_config_parse`/`bsq_config_load`
 * and not have been freed.
 */
void bsq_config_free(struct BsqConfig *config);

/**
 * Starts a trajectory on the reference mesh driven by path `seed`.
 *
 * # Safety
 * `config` must be a live configuration and `out` a valid pointer.
 */
enum BsqStatus bsq_simulation_new(const struct BsqConfig *config,
                                  uint64_t seed,
                                  struct BsqSimulation **out);

/**
 * Advances by `count` steps. Fails without moving if that would pass
 * the horizon; on a Picard failure the state stays at the last
 * converged step.
 *
 * # Safety
 * `sim` must be a live simulation.
 */
enum BsqStatus bsq_simulation_advance(struct BsqSimulation *sim, size_t count);

/**
 * Current step, total steps and time `t = step * T / steps`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum BsqStatus bsq_simulation_progress(const struct BsqSimulation *sim,
                                       size_t *step,
                                       size_t *total,
                                       double *time);

/**
 * `||u||^2` and `||theta||^2` in L^2 of the current state.
 *
 * # Safety
 * All pointers must be valid.
 */
enum BsqStatus bsq_simulation_energy(const struct BsqSimulation *sim,
                                     double *velocity,
                                     double *temperature);

/**
 * Grid values of the two velocity components, row-major `K x K` each;
 * `len` is the capacity of each buffer and must be at least `K^2`.
 *
 * # Safety
 * `first` and `second` must each hold `len` doubles.
 */
enum BsqStatus bsq_simulation_velocity(const struct BsqSimulation *sim,
                                       double *first,
                                       double *second,
                                       size_t len);

/**
 * Grid values of the temperature, row-major `K x K`.
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
enum BsqStatus bsq_simulation_temperature(const struct BsqSimulation *sim, double *out, size_t len);

/**
 * Releases a simulation. Null is ignored.
 *
 * # Safety
 * `sim` must be null or a live simulation.
 */
void bsq_simulation_free(struct BsqSimulation *sim);

/**
 * Runs a whole experiment, writing its tables under `out_dir`.
 * `workers` is the number of threads; 0 is treated as 1.
 *
 * # Safety
 * `config` must be live and `out_dir` a NUL-terminated string.
 */
enum BsqStatus bsq_run_campaign(const struct BsqConfig *config,
                                enum BsqCampaign kind,
                                const char *out_dir,
                                size_t workers,
                                bool resume);

/**
 * Runs the identity suite on a `grid x grid` mesh with `samples`
 * random fields and stores whether every check passed.
 *
 * # Safety
 * `passed` must be a valid pointer.
 */
enum BsqStatus bsq_selftest(size_t grid, size_t samples, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOUSSINESQ_H */
