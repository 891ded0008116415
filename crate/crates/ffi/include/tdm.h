#ifndef TDM_H
#define TDM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TdmStatus {
  TDM_STATUS_OK = 0,
  /**
   * No plan beats the quality bound.
   */
  TDM_STATUS_NO_PLAN = 1,
  TDM_STATUS_NULL_POINTER = 2,
  TDM_STATUS_INVALID_UTF8 = 3,
  TDM_STATUS_PARSE = 4,
  TDM_STATUS_GROUND = 5,
  TDM_STATUS_INVALID_ARGUMENT = 6,
  TDM_STATUS_OUT_OF_RANGE = 7,
  TDM_STATUS_RUN = 8,
  TDM_STATUS_PANIC = 9,
} TdmStatus;

/**
 * Gain values per (state, action); missing entries read as the INF value.
 */
typedef struct TdmGains TdmGains;

/**
 * A plan returned by `tdm_solve`.
 */
typedef struct TdmPlan TdmPlan;

/**
 * A grounded transition system.
 */
typedef struct TdmSystem TdmSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *tdm_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed only once.
 */
void tdm_string_free(char *s);

/**
 * Parse a domain description and ground it from its initial state.
 *
 * # Safety
 * `domain` must be a NUL-terminated string; `out` must be writable.
 */
enum TdmStatus tdm_system_from_domain(const char *domain, struct TdmSystem **out);

/**
 * # Safety
 * `sys` must be NULL or a handle from `tdm_system_from_domain`, freed only once.
 */
void tdm_system_free(struct TdmSystem *sys);

/**
 * Number of grounded states; 0 for NULL.
 *
 * # Safety
 * `sys` must be NULL or a live handle.
 */
size_t tdm_system_state_count(const struct TdmSystem *sys);

/**
 * Number of grounded transitions; 0 for NULL.
 *
 * # Safety
 * `sys` must be NULL or a live handle.
 */
size_t tdm_system_transition_count(const struct TdmSystem *sys);

/**
 * Comma-separated true fluents of state `index`.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum TdmStatus tdm_system_state_text(const struct TdmSystem *sys, size_t index, char **out);

/**
 * Empty gain table whose missing entries read as `inf_value`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TdmStatus tdm_gains_new(double inf_value, struct TdmGains **out);

/**
 * # Safety
 * `gains` must be NULL or a handle from `tdm_gains_new`, freed only once.
 */
void tdm_gains_free(struct TdmGains *gains);

/**
 * Set the gain of `action` at state `state`; the value must be finite.
 *
 * # Safety
 * `gains` must be a live handle; `action` a NUL-terminated string.
 */
enum TdmStatus tdm_gains_set(struct TdmGains *gains,
                             size_t state,
                             const char *action,
                             double value);

/**
 * Best simple path of at most `max_len` steps whose quality exceeds
 * `quality_bound`. Returns `NoPlan` and leaves `out` untouched when none does.
 *
 * # Safety
 * `sys` and `gains` must be live handles; `out` must be writable.
 */
enum TdmStatus tdm_solve(const struct TdmSystem *sys,
                         const struct TdmGains *gains,
                         double quality_bound,
                         size_t max_len,
                         struct TdmPlan **out);

/**
 * # Safety
 * `plan` must be NULL or a handle from `tdm_solve`, freed only once.
 */
void tdm_plan_free(struct TdmPlan *plan);

/**
 * Number of steps; 0 for NULL.
 *
 * # Safety
 * `plan` must be NULL or a live handle.
 */
size_t tdm_plan_len(const struct TdmPlan *plan);

/**
 * Quality at solve time; NaN for NULL.
 *
 * # Safety
 * `plan` must be NULL or a live handle.
 */
double tdm_plan_quality(const struct TdmPlan *plan);

/**
 * Source state, target state and action name of step `index`. Any of the
 * out-parameters may be NULL.
 *
 * # Safety
 * `plan` must be a live handle; non-NULL out-parameters must be writable.
 */
enum TdmStatus tdm_plan_step(const struct TdmPlan *plan,
                             size_t index,
                             size_t *from,
                             size_t *to,
                             char **action);

/**
 * One line per step with its gain, then the plan quality.
 *
 * # Safety
 * `plan` and `gains` must be live handles; `out` must be writable.
 */
enum TdmStatus tdm_plan_trace(const struct TdmPlan *plan, const struct TdmGains *gains, char **out);

/**
 * Run every agent of an experiment config file and write its CSV logs.
 * `out_dir` may be NULL to use the config's output directory.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out_dir` NULL or one.
 */
enum TdmStatus tdm_run_config(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TDM_H */
