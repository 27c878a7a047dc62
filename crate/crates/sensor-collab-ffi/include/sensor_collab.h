#ifndef SENSOR_COLLAB_H
#define SENSOR_COLLAB_H

/* Generated by cbindgen from sensor-collab-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every FFI entry point.
 */
typedef enum CollabStatus {
  COLLAB_STATUS_OK = 0,
  COLLAB_STATUS_NULL_POINTER = 1,
  COLLAB_STATUS_INVALID_PARAMETER = 2,
  COLLAB_STATUS_INFEASIBLE = 3,
  COLLAB_STATUS_SOLVER_FAILURE = 4,
  COLLAB_STATUS_SERIALIZATION = 5,
  COLLAB_STATUS_PANIC = 6,
} CollabStatus;

/**
 * Opaque scenario handle: deployment plus precomputed quadratic forms.
 */
typedef struct CollabScenario CollabScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *collab_last_error(void);

/**
 * Builds a randomly deployed scenario with default statistical parameters.
 */
enum CollabStatus collab_scenario_build(uintptr_t n, uint64_t seed, struct CollabScenario **out);

/**
 * Restores a scenario from its JSON form.
 */
enum CollabStatus collab_scenario_from_json(const char *json, struct CollabScenario **out);

/**
 * Serializes the scenario to JSON (caller frees via collab_string_free).
 */
enum CollabStatus collab_scenario_to_json(const struct CollabScenario *handle, char **out);

void collab_scenario_free(struct CollabScenario *handle);

void collab_string_free(char *s);

/**
 * Information ceiling J0 of the network.
 */
enum CollabStatus collab_info_bound(const struct CollabScenario *handle, double *out);

/**
 * Distortion floor D0 of the network.
 */
enum CollabStatus collab_distortion_floor(const struct CollabScenario *handle, double *out);

/**
 * Converts a normalized-distortion target to an information threshold.
 */
enum CollabStatus collab_dnorm_to_j(const struct CollabScenario *handle, double dnorm, double *out);

/**
 * Information-constrained collaboration solve; writes a report JSON.
 */
enum CollabStatus collab_solve_info(const struct CollabScenario *handle,
                                    double j_check,
                                    char **report_json);

/**
 * Energy-constrained collaboration solve; writes a report JSON.
 */
enum CollabStatus collab_solve_energy(const struct CollabScenario *handle,
                                      double p_hat,
                                      char **report_json);

/**
 * Joint selection-and-collaboration solve; writes a report JSON.
 */
enum CollabStatus collab_solve_joint(const struct CollabScenario *handle,
                                     double j_check,
                                     char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SENSOR_COLLAB_H */
