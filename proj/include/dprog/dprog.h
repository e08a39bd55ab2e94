/* C interface to the damage-prognosis library.
 *
 * All functions return a dprog_status. On failure, dprog_last_error() gives
 * a message for the calling thread that stays valid until its next call.
 * Strings returned through char** out-parameters are owned by the caller and
 * released with dprog_string_free.
 */
#ifndef DPROG_DPROG_H
#define DPROG_DPROG_H

#include <stddef.h>
#include <stdint.h>

#if defined(DPROG_BUILDING)
#define DPROG_API __attribute__((visibility("default")))
#else
#define DPROG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dprog_status {
  DPROG_OK = 0,
  DPROG_ERR_INVALID_ARGUMENT = 1,
  DPROG_ERR_DIMENSION_MISMATCH = 2,
  DPROG_ERR_NUMERICAL = 3,
  DPROG_ERR_IO = 4,
  DPROG_ERR_CONFIG = 5,
  DPROG_ERR_INTERNAL = 6
} dprog_status;

typedef struct dprog_config dprog_config;
typedef struct dprog_model dprog_model;

DPROG_API const char* dprog_version(void);
DPROG_API const char* dprog_status_name(dprog_status status);
DPROG_API const char* dprog_last_error(void);
DPROG_API void dprog_string_free(char* s);

/* Configuration */
DPROG_API dprog_status dprog_config_defaults(dprog_config** out);
DPROG_API dprog_status dprog_config_load(const char* path, dprog_config** out);
DPROG_API void dprog_config_free(dprog_config* cfg);
DPROG_API dprog_status dprog_config_set_seed(dprog_config* cfg, uint64_t seed);
DPROG_API dprog_status dprog_config_set_output_dir(dprog_config* cfg, const char* dir);
DPROG_API dprog_status dprog_config_set_decision_step(dprog_config* cfg, size_t step);
/* NULL clears a previously forced candidate. */
DPROG_API dprog_status dprog_config_set_force_candidate(dprog_config* cfg, const char* id);
/* Pretty-printed JSON document with every setting spelled out. */
DPROG_API dprog_status dprog_config_to_json(const dprog_config* cfg, char** out);

/* Pipeline commands. Each reads and writes under the configured output dir. */
DPROG_API dprog_status dprog_simulate(const dprog_config* cfg);
DPROG_API dprog_status dprog_fit(const dprog_config* cfg);
DPROG_API dprog_status dprog_monitor(const dprog_config* cfg);
DPROG_API dprog_status dprog_update_evaluate(const dprog_config* cfg);
/* report_json may be NULL. */
DPROG_API dprog_status dprog_reproduce_paper(const dprog_config* cfg, char** report_json);

/* Fitted models, as written by dprog_fit. */
DPROG_API dprog_status dprog_model_load(const char* path, dprog_model** out);
DPROG_API void dprog_model_free(dprog_model* model);
DPROG_API dprog_status dprog_model_dims(const dprog_model* model, size_t* n_points,
                                        size_t* n_components);
DPROG_API dprog_status dprog_model_project(const dprog_model* model, const double* values,
                                           size_t n_points, double* scores, size_t n_components);
DPROG_API dprog_status dprog_model_reconstruct(const dprog_model* model, const double* scores,
                                               size_t n_components, double* values,
                                               size_t n_points);

#ifdef __cplusplus
}
#endif

#endif
