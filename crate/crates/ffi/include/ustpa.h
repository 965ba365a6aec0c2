/* C interface to the ustpa safety-analysis toolkit. Generated by cbindgen; do not edit. */

#ifndef USTPA_H
#define USTPA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by the fallible entry points.
typedef enum UstpaStatus {
  // The call succeeded.
  UstpaStatus_Ok = 0,
  // The input text could not be parsed; see `ustpa_last_error`.
  UstpaStatus_ParseError = 1,
  // The parsed input violated a model invariant; see `ustpa_last_error`.
  UstpaStatus_ValidationError = 2,
  // A pointer argument was NULL or text was not valid UTF-8.
  UstpaStatus_InvalidArgument = 3,
  // An internal panic was caught; see `ustpa_last_error`.
  UstpaStatus_Internal = 4,
} UstpaStatus;

// Opaque handle to a validated safety model.
typedef struct UstpaModel UstpaModel;

// Element counts of a model, filled by `ustpa_model_counts`.
typedef struct UstpaCounts {
  size_t losses;
  size_t hazards;
  size_t nodes;
  size_t edges;
  size_t actions;
  size_t ucas;
  size_t scenarios;
  size_t requirements;
} UstpaCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The most recent error message on this thread, or NULL if the last call
// succeeded. The pointer stays valid until the next failing ustpa call on
// the same thread; do not free it.
const char *ustpa_last_error(void);

// The crate version as a static NUL-terminated string. Never freed.
const char *ustpa_version(void);

// Parses and validates DSL text into a model handle.
//
// On success writes the handle to `out_model` and returns `Ok`; the
// handle must be released with `ustpa_model_free`. On failure the handle
// is untouched and `ustpa_last_error` describes the first problem.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out_model` a valid
// pointer.
enum UstpaStatus ustpa_model_parse(const char *text, struct UstpaModel **out_model);

// Releases a model handle. NULL is a no-op.
//
// # Safety
// `model` must be NULL or a pointer from `ustpa_model_parse` not yet
// freed.
void ustpa_model_free(struct UstpaModel *model);

// Releases a string returned by any ustpa function. NULL is a no-op.
//
// # Safety
// `text` must be NULL or an owned string pointer from this library not
// yet freed.
void ustpa_string_free(char *text);

// Fills `out_counts` with the model's element counts.
//
// # Safety
// `model` must be a live handle and `out_counts` a valid pointer.
enum UstpaStatus ustpa_model_counts(const struct UstpaModel *model, struct UstpaCounts *out_counts);

// Renders the model back to canonical DSL text.
//
// # Safety
// `model` must be a live handle and `out_text` a valid pointer; the
// result is released with `ustpa_string_free`.
enum UstpaStatus ustpa_model_render(const struct UstpaModel *model, char **out_text);

// Exports the full analysis report as deterministic JSON.
//
// # Safety
// Same contract as `ustpa_model_render`.
enum UstpaStatus ustpa_model_report_json(const struct UstpaModel *model, char **out_text);

// Exports the full analysis report as markdown tables.
//
// # Safety
// Same contract as `ustpa_model_render`.
enum UstpaStatus ustpa_model_report_markdown(const struct UstpaModel *model, char **out_text);

// Exports the control structure as Graphviz DOT.
//
// # Safety
// Same contract as `ustpa_model_render`.
enum UstpaStatus ustpa_model_graph_dot(const struct UstpaModel *model, char **out_text);

// Replays a monitor trace through the runtime guard and returns the
// decision log (one line per step).
//
// `policy_text` may be NULL to use the default policy.
//
// # Safety
// `trace_text` must be a valid NUL-terminated string, `policy_text` NULL
// or likewise, and `out_log` a valid pointer; the result is released with
// `ustpa_string_free`.
enum UstpaStatus ustpa_simulate_trace(const char *trace_text,
                                      const char *policy_text,
                                      char **out_log);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* USTPA_H */
