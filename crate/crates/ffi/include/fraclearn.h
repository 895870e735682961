#ifndef FRACLEARN_H
#define FRACLEARN_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FlStatus {
  FL_STATUS_OK = 0,
  FL_STATUS_NULL_POINTER = 1,
  FL_STATUS_INVALID_UTF8 = 2,
  FL_STATUS_INVALID_ARGUMENT = 3,
  FL_STATUS_PARSE = 4,
  FL_STATUS_TUTOR = 5,
  FL_STATUS_PANIC = 6,
} FlStatus;

// Opaque simulated learner.
typedef struct FlAgent FlAgent;

// Opaque tutor state for one problem.
typedef struct FlTutor FlTutor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *fl_version(void);

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *fl_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
//
// `s` must be null or a pointer obtained from this library that has not
// been freed.
void fl_string_free(char *s);

// Creates a tutor for a problem written like `1/2+1/3` or `2/3*4/5`.
//
// # Safety
//
// `problem` must be a NUL-terminated string and `out` a valid pointer.
enum FlStatus fl_tutor_new(const char *problem, struct FlTutor **out);

// # Safety
//
// `tutor` must be null or a handle from [`fl_tutor_new`] not yet freed.
void fl_tutor_free(struct FlTutor *tutor);

// Submits a value for a field. Boolean fields read `value != 0`. On success
// `out_correct` receives the tutor's verdict.
//
// # Safety
//
// Pointers must be valid; `field` must be NUL-terminated.
enum FlStatus fl_tutor_check_step(struct FlTutor *tutor,
                                  const char *field,
                                  int64_t value,
                                  bool *out_correct);

// Applies the next bottom-out hint and reports the demonstrated step.
// Boolean values are reported as 0 or 1.
//
// # Safety
//
// Pointers must be valid. `out_field` receives an owned string.
enum FlStatus fl_tutor_apply_hint(struct FlTutor *tutor, char **out_field, int64_t *out_value);

// # Safety
//
// Pointers must be valid.
enum FlStatus fl_tutor_is_done(const struct FlTutor *tutor, bool *out_done);

// Creates an agent from a JSON configuration. Null or empty `config_json`
// selects the default whole-number-only configuration.
//
// # Safety
//
// `config_json` must be null or NUL-terminated; `out` must be valid.
enum FlStatus fl_agent_new(const char *config_json, uint64_t seed, struct FlAgent **out);

// Restores an agent from a snapshot made by [`fl_agent_to_json`].
//
// # Safety
//
// `json` must be NUL-terminated; `out` must be valid.
enum FlStatus fl_agent_from_json(const char *json, struct FlAgent **out);

// # Safety
//
// `agent` must be null or a handle from this library not yet freed.
void fl_agent_free(struct FlAgent *agent);

// Serializes the agent's skills, value tables, parameters and random state.
//
// # Safety
//
// Pointers must be valid. `out_json` receives an owned string.
enum FlStatus fl_agent_to_json(const struct FlAgent *agent, char **out_json);

// Works one problem to completion. `out_json` receives the first-attempt
// records as a JSON array.
//
// # Safety
//
// Pointers must be valid; `problem` must be NUL-terminated.
enum FlStatus fl_agent_run_problem(struct FlAgent *agent, const char *problem, char **out_json);

// Generates a practice sequence (`blocked-a`, `blocked-b`, `interleaved` or
// `faded`) as a JSON array of problem ids.
//
// # Safety
//
// `schema` must be NUL-terminated; `out_json` must be valid.
enum FlStatus fl_sequence_generate(const char *schema, uint64_t seed, char **out_json);

// Computes one student's learning curve from transaction CSV text and
// returns it as CSV.
//
// # Safety
//
// String arguments must be NUL-terminated; `out_csv` must be valid.
enum FlStatus fl_learning_curve_csv(const char *transactions_csv,
                                    const char *student_id,
                                    char **out_csv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACLEARN_H */
