#ifndef STACKY_H
#define STACKY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StackyStatus {
  STACKY_STATUS_OK = 0,
  STACKY_STATUS_NULL_POINTER = 1,
  STACKY_STATUS_INVALID_UTF8 = 2,
  STACKY_STATUS_PARSE = 3,
  STACKY_STATUS_INVALID_FAN = 4,
  STACKY_STATUS_INVALID_EXTENSION = 5,
  STACKY_STATUS_SIZE_BOUND = 6,
  /**
   * a check ran and came out negative (e.g. the lemma failed)
   */
  STACKY_STATUS_CHECK_FAILED = 7,
  STACKY_STATUS_INTERNAL = 8,
  STACKY_STATUS_PANIC = 9,
} StackyStatus;

/**
 * Opaque handle to a stacky fan.
 */
typedef struct StackyFanHandle StackyFanHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *stacky_last_error(void);

/**
 * Static version string; do not free.
 */
const char *stacky_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void stacky_string_free(char *s);

/**
 * # Safety
 * `h` must be null or a handle returned by this library, freed once.
 */
void stacky_fan_free(struct StackyFanHandle *h);

/**
 * Parses a stacky fan file's JSON. The fan is not validated; see
 * [`stacky_fan_validate`].
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum StackyStatus stacky_fan_from_json(const char *json, struct StackyFanHandle **out);

/**
 * Canonical JSON of the fan as stored.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum StackyStatus stacky_fan_to_json(const struct StackyFanHandle *h, char **out);

/**
 * Writes `{"valid": bool, "diagnostics": [...]}` and returns
 * [`StackyStatus::InvalidFan`] when the fan is invalid.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum StackyStatus stacky_fan_validate(const struct StackyFanHandle *h, bool strict, char **out);

/**
 * Quotient presentation `[Z/G]`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum StackyStatus stacky_present(const struct StackyFanHandle *h, char **out);

/**
 * Gale dual of `β` with the exact-sequence report.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum StackyStatus stacky_gale_dual(const struct StackyFanHandle *h, char **out);

/**
 * Gerbe of `h` along the extension given as JSON. On success `out_fan`
 * receives the new stacky fan and `out` the full result.
 *
 * # Safety
 * `h` must be a live handle, `extension_json` a nul-terminated string and
 * both out-parameters writable.
 */
enum StackyStatus stacky_gerbe(const struct StackyFanHandle *h,
                               const char *extension_json,
                               struct StackyFanHandle **out_fan,
                               char **out);

/**
 * Underlying orbifold, in canonical form.
 *
 * # Safety
 * `h` must be a live handle; `out_fan` must be writable.
 */
enum StackyStatus stacky_rigidify(const struct StackyFanHandle *h,
                                  struct StackyFanHandle **out_fan);

/**
 * Vanishing of `H^1` and `H^2` of the arrangement complement with `Z/modulus`
 * coefficients. Returns [`StackyStatus::CheckFailed`] (with the report
 * still written) when they do not vanish.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum StackyStatus stacky_lemma(const struct StackyFanHandle *h,
                               uint64_t modulus,
                               size_t max_vertices,
                               char **out);

/**
 * Smith normal form of a JSON matrix (array of rows).
 *
 * # Safety
 * `matrix_json` must be a nul-terminated string; `out` must be writable.
 */
enum StackyStatus stacky_snf(const char *matrix_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STACKY_H */
