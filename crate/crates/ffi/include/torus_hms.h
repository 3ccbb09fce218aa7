#ifndef TORUS_HMS_H
#define TORUS_HMS_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FhmsRelation {
  FHMS_RELATION_ISO = 0,
  FHMS_RELATION_MIRROR = 1,
  FHMS_RELATION_DERIVED_EQ = 2,
} FhmsRelation;

// Result code of every exported function.
typedef enum FhmsStatus {
  FHMS_STATUS_OK = 0,
  // A check ran and came out negative, or a search found nothing within
  // its bound.
  FHMS_STATUS_REFUTED = 1,
  FHMS_STATUS_NULL_POINTER = 2,
  FHMS_STATUS_INVALID_UTF8 = 3,
  FHMS_STATUS_PARSE = 4,
  FHMS_STATUS_INVALID_TORUS = 5,
  FHMS_STATUS_PRECONDITION = 6,
  FHMS_STATUS_BUDGET_EXCEEDED = 7,
  FHMS_STATUS_INTERNAL = 8,
  FHMS_STATUS_PANIC = 9,
} FhmsStatus;

// Opaque validated torus.
typedef struct FhmsTorus FhmsTorus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL. The pointer
// stays valid until the next call into the library from this thread.
const char *fhms_last_error(void);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void fhms_string_free(char *s);

// Parse and validate a torus from its JSON text.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum FhmsStatus fhms_torus_from_json(const char *json, struct FhmsTorus **out);

// # Safety
// `t` must be NULL or a handle from this library that has not been freed.
void fhms_torus_free(struct FhmsTorus *t);

// Complex dimension `d` of the torus, or 0 for NULL.
//
// # Safety
// `t` must be NULL or a live handle.
uintptr_t fhms_torus_dim(const struct FhmsTorus *t);

// # Safety
// `t` must be a live handle and `out` writable.
enum FhmsStatus fhms_torus_to_json(const struct FhmsTorus *t, char **out);

// Bounded search for a relation certificate. Writes the search outcome as
// JSON; returns `FHMS_STATUS_REFUTED` when nothing was found within the bound.
//
// # Safety
// Handles must be live and `out_json` writable.
enum FhmsStatus fhms_search_relation(const struct FhmsTorus *source,
                                     const struct FhmsTorus *target,
                                     enum FhmsRelation kind,
                                     uint32_t bound,
                                     uint64_t node_budget,
                                     char **out_json);

// T-dual partner along `A` for the splitting `"a1;a2|b1;b2"`. The mirror is
// returned as a new handle and the duality certificate as JSON.
//
// # Safety
// `t` must be live, `split` NUL-terminated, outputs writable.
enum FhmsStatus fhms_mirror(const struct FhmsTorus *t,
                            const char *split,
                            struct FhmsTorus **out_mirror,
                            char **out_certificate_json);

// Hodge numbers as JSON `{"d", "h"}`.
//
// # Safety
// `t` must be live and `out_json` writable.
enum FhmsStatus fhms_hodge(const struct FhmsTorus *t, char **out_json);

// Dimension of the kernel of `∧ω` on middle-degree classes.
//
// # Safety
// `t` must be live and `out` writable.
enum FhmsStatus fhms_lefschetz_kernel_dim(const struct FhmsTorus *t, uintptr_t *out);

// Coisotropic brane check on the brane JSON; `FHMS_STATUS_REFUTED` for a rejection.
//
// # Safety
// `t` must be live, `brane_json` NUL-terminated, `out_json` writable.
enum FhmsStatus fhms_abrane_check(const struct FhmsTorus *t,
                                  const char *brane_json,
                                  char **out_json);

// Run a command-line invocation (`argv[0]` is the program name). Writes the
// JSON report and the process exit code the binary would use.
//
// # Safety
// `argv` must hold `argc` NUL-terminated strings; outputs writable.
enum FhmsStatus fhms_cli_run(const char *const *argv,
                             uintptr_t argc,
                             char **out_report,
                             int32_t *out_exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORUS_HMS_H */
