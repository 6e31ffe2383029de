#ifndef ELLIPSIS_H
#define ELLIPSIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Linking setting of the problem file itself.
 */
#define ELL_LINKING_DEFAULT -1

#define ELL_LINKING_OFF 0

#define ELL_LINKING_ON 1

typedef enum EllStatus {
  ELL_STATUS_OK = 0,
  /**
   * The readings differ from the problem's expectations.
   */
  ELL_STATUS_MISMATCH = 1,
  ELL_STATUS_ENGINE_ERROR = 2,
  ELL_STATUS_PARSE_ERROR = 3,
  ELL_STATUS_INVALID_ARGUMENT = 4,
} EllStatus;

/**
 * A parsed problem file.
 */
typedef struct EllProblem EllProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses problem text. `name` labels the problem in reports and may be null.
 * On success `*out` owns a handle to release with [`ell_problem_free`].
 *
 * # Safety
 * `text` and `name` must be null or NUL-terminated strings; `out` must be
 * valid for writes.
 */
enum EllStatus ell_problem_parse(const char *text, const char *name, struct EllProblem **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `problem` must be null or come from [`ell_problem_parse`], and not be
 * used afterwards.
 */
void ell_problem_free(struct EllProblem *problem);

/**
 * Resolves the problem and writes its JSON report to `*json_out`, which the
 * caller releases with [`ell_string_free`]. The report is written for every
 * status except `INVALID_ARGUMENT`. `linking` is one of the
 * `ELL_LINKING_*` constants.
 *
 * # Safety
 * `problem` must be a live handle; `json_out` must be valid for writes.
 */
enum EllStatus ell_problem_run(const struct EllProblem *problem, int linking, char **json_out);

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *ell_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or come from this library, and not be used afterwards.
 */
void ell_string_free(char *s);

/**
 * Library version, statically allocated.
 */
const char *ell_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ELLIPSIS_H */
