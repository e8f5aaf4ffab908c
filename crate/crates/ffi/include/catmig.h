#ifndef CATMIG_H
#define CATMIG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CatmigFunctoriality {
  CATMIG_FUNCTORIALITY_FUNCTORIAL = 0,
  CATMIG_FUNCTORIALITY_NOT_FUNCTORIAL = 1,
  CATMIG_FUNCTORIALITY_UNDETERMINED = 2,
} CatmigFunctoriality;

typedef enum CatmigKind {
  CATMIG_KIND_DELTA = 0,
  CATMIG_KIND_SIGMA = 1,
  CATMIG_KIND_PI = 2,
} CatmigKind;

typedef enum CatmigProof {
  CATMIG_PROOF_PROVEN = 0,
  CATMIG_PROOF_REFUTED = 1,
  CATMIG_PROOF_UNKNOWN = 2,
} CatmigProof;

typedef enum CatmigStatus {
  CATMIG_STATUS_OK = 0,
  CATMIG_STATUS_NULL_POINTER = 1,
  CATMIG_STATUS_INVALID_UTF8 = 2,
  CATMIG_STATUS_PARSE = 3,
  CATMIG_STATUS_VALIDATION = 4,
  CATMIG_STATUS_NOT_FOUND = 5,
  /**
   * A well-formed request whose operation failed, such as a migration.
   */
  CATMIG_STATUS_DOMAIN = 6,
  /**
   * Functoriality could not be decided within the budget.
   */
  CATMIG_STATUS_UNKNOWN = 7,
  CATMIG_STATUS_PANIC = 8,
} CatmigStatus;

/**
 * Validated schemas, mappings and instances from one source text.
 */
typedef struct CatmigWorkspace CatmigWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates `source`. On success `*out` owns a workspace that
 * must be released with [`catmig_workspace_free`].
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CatmigStatus catmig_workspace_parse(const char *source, struct CatmigWorkspace **out);

/**
 * # Safety
 * `ws` must come from [`catmig_workspace_parse`] and not be freed twice.
 */
void catmig_workspace_free(struct CatmigWorkspace *ws);

/**
 * Counts the equation violations of `instance` into `*violations`. A
 * nonzero count is not an error.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum CatmigStatus catmig_check(const struct CatmigWorkspace *ws,
                               const char *instance,
                               size_t *violations);

/**
 * Decides `equation` (for example `"admin.works = id:Dept"`) in `schema`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum CatmigStatus catmig_prove(const struct CatmigWorkspace *ws,
                               const char *schema,
                               const char *equation,
                               enum CatmigProof *outcome);

/**
 * Checks that `mapping` sends every source equation to a provable one.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum CatmigStatus catmig_map_check(const struct CatmigWorkspace *ws,
                                   const char *mapping,
                                   enum CatmigFunctoriality *verdict);

/**
 * Migrates `instance` along `mapping` and writes the result, as canonical
 * source text for an instance named `<kind>_<mapping>_<instance>`, to
 * `*result`. Free it with [`catmig_string_free`].
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum CatmigStatus catmig_migrate(const struct CatmigWorkspace *ws,
                                 enum CatmigKind kind,
                                 const char *mapping,
                                 const char *instance,
                                 char **result);

/**
 * The message of the last failed call on this thread, or null. Owned by
 * the library and valid until the next call on this thread.
 */
const char *catmig_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void catmig_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CATMIG_H */
